# backend/workbench/shared/metrics.py
"""열거/실험 메트릭 수집"""

import threading
import time
from typing import Dict, Any, List, Optional
from collections import defaultdict, deque
from contextlib import contextmanager
import logging

logger = logging.getLogger(__name__)


class MetricsCollector:
    """카운터와 이벤트 수집기"""

    def __init__(self):
        self.metrics: Dict[str, deque] = defaultdict(lambda: deque(maxlen=1000))
        self.counters: Dict[str, int] = defaultdict(int)
        self._lock = threading.Lock()

    def record_event(self, event_type: str, value: float = 1.0,
                     tags: Optional[Dict[str, str]] = None):
        """이벤트 기록"""
        metric_name = event_type
        if tags:
            tag_str = ",".join(f"{k}={v}" for k, v in sorted(tags.items()))
            metric_name = f"{event_type},{tag_str}"
        with self._lock:
            self.metrics[metric_name].append(value)

    def increment_counter(self, counter_name: str, value: int = 1):
        """카운터 증가"""
        with self._lock:
            self.counters[counter_name] += value

    @contextmanager
    def timed(self, event_type: str, **tags: str):
        """블록 실행 시간(초)을 이벤트로 기록"""
        started = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - started
            self.record_event(event_type, elapsed, tags or None)
            logger.debug(f"{event_type} {tags} took {elapsed:.4f}s")

    def get_metrics_summary(self) -> Dict[str, Any]:
        """메트릭 요약"""
        with self._lock:
            summary = {
                'counters': dict(self.counters),
                'events': {}
            }
            for metric_name, values in self.metrics.items():
                recent_values: List[float] = list(values)
                if recent_values:
                    summary['events'][metric_name] = {
                        'count': len(recent_values),
                        'sum': sum(recent_values),
                        'avg': sum(recent_values) / len(recent_values),
                        'min': min(recent_values),
                        'max': max(recent_values)
                    }
        return summary

    def reset(self):
        with self._lock:
            self.metrics.clear()
            self.counters.clear()


# 싱글톤 인스턴스
metrics = MetricsCollector()

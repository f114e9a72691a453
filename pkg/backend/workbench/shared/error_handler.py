# backend/workbench/shared/error_handler.py
"""중앙 에러 처리"""

import logging
from typing import Any, Dict, List, Optional, Type
from datetime import datetime, timezone
from enum import Enum
import threading
import traceback

logger = logging.getLogger(__name__)


class ErrorSeverity(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class WorkbenchError(Exception):
    """모든 workbench 예외의 기반"""
    severity = ErrorSeverity.MEDIUM
    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details


class DomainError(WorkbenchError):
    """입력이 연산의 정의역을 벗어남"""
    exit_code = 1


class FormatError(WorkbenchError):
    """파일/인자 파싱 실패"""
    severity = ErrorSeverity.LOW
    exit_code = 2


class ResourceCapExceeded(WorkbenchError):
    """열거 크기가 cap을 초과"""
    severity = ErrorSeverity.HIGH
    exit_code = 3

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}", size=size, cap=cap)
        self.size = size
        self.cap = cap


class RankMismatch(DomainError):
    pass


class RadiusMismatch(DomainError):
    pass


class ModulusMismatch(DomainError):
    pass


class ElementOutOfRange(DomainError):
    pass


class AlphabetMismatch(DomainError):
    pass


class DimensionMismatch(DomainError):
    pass


class InsufficientRadius(DomainError):
    pass


class NotLocal(DomainError):
    """두 입력이 B_m 위에서 같은데 출력이 다름"""

    def __init__(self, bound: int, witnesses: Optional[tuple] = None):
        super().__init__(f"map is not local with radius bound {bound}", bound=bound)
        self.bound = bound
        self.witnesses = witnesses


class NotEquivariant(DomainError):
    pass


class NotInvertible(DomainError):
    pass


class NotOneSidedInverse(DomainError):
    pass


class NotCosetConstant(DomainError):
    pass


class WindowTooSmall(DomainError):
    pass


class EmbeddingRadiusNotFound(DomainError):
    pass


class StageFailure(DomainError):
    """experiment 단계 실패"""
    severity = ErrorSeverity.HIGH

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}' failed: {message}", stage=stage)
        self.stage = stage


class PropertyViolation(DomainError):
    """정리로 보장되는 성질이 깨짐 - 구현 버그"""
    severity = ErrorSeverity.CRITICAL


class ErrorHandler:
    """에러 기록 및 exit code 변환"""

    def __init__(self, history_limit: int = 100):
        self.error_history: Dict[str, List[Dict[str, Any]]] = {}
        self.history_limit = history_limit
        self.exit_codes: Dict[Type[Exception], int] = {
            FormatError: 2,
            ResourceCapExceeded: 3,
            WorkbenchError: 1,
            ValueError: 2,
        }
        self._lock = threading.Lock()

    def exit_code_for(self, error: Exception) -> int:
        """예외 -> CLI exit code"""
        for error_type in type(error).__mro__:
            if error_type in self.exit_codes:
                return self.exit_codes[error_type]
        return 1

    def record(self, context: str, error: Exception) -> Dict[str, Any]:
        """에러 기록"""
        severity = getattr(error, "severity", ErrorSeverity.MEDIUM)
        error_record = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'error_type': type(error).__name__,
            'error_message': str(error),
            'severity': severity.value,
            'exit_code': self.exit_code_for(error),
            'traceback': traceback.format_exc(),
        }
        with self._lock:
            history = self.error_history.setdefault(context, [])
            history.append(error_record)
            # 최대 history_limit개만 유지
            if len(history) > self.history_limit:
                self.error_history[context] = history[-self.history_limit:]

        if severity in (ErrorSeverity.HIGH, ErrorSeverity.CRITICAL):
            logger.error(f"{context}: {type(error).__name__}: {error}")
        else:
            logger.warning(f"{context}: {type(error).__name__}: {error}")
        return error_record

    def get_error_stats(self) -> Dict[str, Any]:
        """에러 통계 반환"""
        with self._lock:
            all_errors = [
                {'context': context, **error}
                for context, errors in self.error_history.items()
                for error in errors
            ]
        all_errors.sort(key=lambda x: x['timestamp'], reverse=True)
        by_code: Dict[int, int] = {}
        for error in all_errors:
            by_code[error['exit_code']] = by_code.get(error['exit_code'], 0) + 1
        return {
            'total_contexts': len(self.error_history),
            'total_errors': len(all_errors),
            'by_exit_code': by_code,
            'recent_errors': [
                {k: v for k, v in e.items() if k != 'traceback'} for e in all_errors[:10]
            ],
        }

    def clear(self):
        with self._lock:
            self.error_history.clear()


# 싱글톤 인스턴스
error_handler = ErrorHandler()

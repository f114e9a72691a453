# backend/workbench/shared/config.py
"""공통 설정"""

from typing import Dict, Any, Optional
import os
from pathlib import Path

from pydantic import BaseModel

# 기본 설정
DEFAULT_SETTINGS: Dict[str, Any] = {
    "ball_cap": 10**6,            # free ball 단어 수 상한
    "pattern_cap": 2**20,         # 한 번에 만드는 window pattern 수 상한
    "configuration_cap": 2**16,   # 유한 configuration 전수 조사 상한
    "group_order_cap": 2000,      # 순열로 만드는 곱셈표의 원소 수 상한
    "debruijn_node_cap": 4096,
    "embedding_radius_cap": 8,
    "extension_symbol": 0,        # rule table 확장 시 채우는 기호
    "max_prime": 97,
    "max_dimension": 4,
    "log_level": "INFO",
    "host": "127.0.0.1",
    "port": 8000,
}

# 환경 변수 이름
ENV_OVERRIDES = {
    "ball_cap": "WORKBENCH_RESOURCE_CAP",
    "pattern_cap": "WORKBENCH_PATTERN_CAP",
    "configuration_cap": "WORKBENCH_CONFIGURATION_CAP",
    "group_order_cap": "WORKBENCH_GROUP_ORDER_CAP",
    "debruijn_node_cap": "WORKBENCH_DEBRUIJN_NODE_CAP",
    "embedding_radius_cap": "WORKBENCH_EMBEDDING_RADIUS_CAP",
    "extension_symbol": "WORKBENCH_EXTENSION_SYMBOL",
    "max_prime": "WORKBENCH_MAX_PRIME",
    "max_dimension": "WORKBENCH_MAX_DIMENSION",
    "log_level": "WORKBENCH_LOG_LEVEL",
    "host": "WORKBENCH_HOST",
    "port": "WORKBENCH_PORT",
}

# 경로 설정
BASE_DIR = Path(os.getenv("WORKBENCH_DATA_PATH", "./data/workbench"))
DUMPS_DIR = BASE_DIR / "dumps"
REPORTS_DIR = BASE_DIR / "reports"


class WorkbenchSettings(BaseModel):
    """실행 시 설정값"""
    ball_cap: int
    pattern_cap: int
    configuration_cap: int
    group_order_cap: int
    debruijn_node_cap: int
    embedding_radius_cap: int
    extension_symbol: int
    max_prime: int
    max_dimension: int
    log_level: str = "INFO"
    host: str = "127.0.0.1"
    port: int = 8000


def load_settings(environ: Optional[Dict[str, str]] = None) -> WorkbenchSettings:
    """DEFAULT_SETTINGS 위에 환경 변수 적용"""
    environ = os.environ if environ is None else environ
    values = dict(DEFAULT_SETTINGS)
    for key, env_name in ENV_OVERRIDES.items():
        raw = environ.get(env_name)
        if raw is not None and raw.strip():
            values[key] = type(DEFAULT_SETTINGS[key])(raw.strip())
    return WorkbenchSettings(**values)


def resolve_cap(explicit: Optional[int], key: str) -> int:
    """명시된 cap이 없으면 settings 값 사용"""
    if explicit is not None:
        return explicit
    return getattr(settings, key)


# 싱글톤 인스턴스
settings = load_settings()

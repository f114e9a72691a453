# backend/models.py - 실험 요청/결과 모델
from pydantic import BaseModel, Field, field_validator
from typing import Dict, List, Optional, Any, Literal

from constants import COMMANDS, EXIT_OK, OUTPUT_FORMATS


class ExperimentSpec(BaseModel):
    """CLI 한 번 실행 / POST /api/lab/{command} 한 번에 해당"""
    command: str

    # 입력 (shorthand 또는 파일 경로)
    group: Optional[str] = None
    group1: Optional[str] = None
    group2: Optional[str] = None
    groups: List[str] = Field(default_factory=list)
    limit: Optional[str] = None
    rule: Optional[str] = None
    rule2: Optional[str] = None
    kernel: Optional[str] = None
    matrix: Optional[str] = None
    inverse: Optional[str] = None
    subshift: str = "full"
    config: Optional[str] = None

    # 파라미터
    period: Optional[int] = Field(default=None, ge=1)
    alphabet: int = Field(default=2, ge=1)
    prime: int = Field(default=2, ge=2)
    radius: Optional[int] = Field(default=None, ge=0)
    rmax: int = Field(default=8, ge=0)
    bound: int = Field(default=3, ge=0)
    max_period: int = Field(default=10, ge=1)
    side: Literal["left", "right"] = "left"
    trials: int = Field(default=0, ge=0)
    size: int = Field(default=2, ge=1)
    seed: int = 0
    minimize: bool = False
    cap: Optional[int] = Field(default=None, ge=1)

    # 출력
    format: str = "table"
    dump: Optional[str] = None

    @field_validator("command")
    @classmethod
    def known_command(cls, value: str) -> str:
        if value not in COMMANDS:
            raise ValueError(f"unknown command {value!r}")
        return value

    @field_validator("format")
    @classmethod
    def known_format(cls, value: str) -> str:
        if value not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {', '.join(OUTPUT_FORMATS)}")
        return value


class ExperimentResult(BaseModel):
    """실행 결과. data 는 canonical JSON 의 내용"""
    command: str
    exit_code: int = EXIT_OK
    data: Dict[str, Any] = Field(default_factory=dict)
    lines: List[str] = Field(default_factory=list)
    rows: Optional[List[List[Any]]] = None
    error: Optional[str] = None
    error_type: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK

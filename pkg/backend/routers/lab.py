# backend/routers/lab.py - 실험 HTTP API

from fastapi import APIRouter, Body, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import ValidationError
from typing import Any, Dict, Optional
import logging

from constants import COMMANDS, HTTP_STATUS, EXIT_PARSE_ERROR
from models import ExperimentResult, ExperimentSpec
from services.experiment_runner import render, run
from workbench.shared import error_handler, metrics

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/commands")
async def list_commands():
    return {"commands": COMMANDS}


@router.get("/metrics")
async def get_metrics():
    return {
        "metrics": metrics.get_metrics_summary(),
        "errors": error_handler.get_error_stats(),
    }


def _execute(command: str, params: Dict[str, Any]) -> ExperimentResult:
    try:
        spec = ExperimentSpec(**{**params, "command": command})
    except ValidationError as e:
        logger.warning(f"rejected {command} request: {e.error_count()} validation errors")
        raise HTTPException(status_code=HTTP_STATUS[EXIT_PARSE_ERROR], detail={
            "error": "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors()),
            "error_type": "ValidationError",
        })

    result = run(spec)
    if not result.ok:
        raise HTTPException(status_code=HTTP_STATUS.get(result.exit_code, 500), detail={
            "error": result.error,
            "error_type": result.error_type,
            "exit_code": result.exit_code,
        })
    return result


# 계산은 threadpool 에서 실행 (sync 핸들러)
@router.post("/{command}")
def run_command(command: str, params: Optional[Dict[str, Any]] = Body(default=None)):
    """canonical JSON 결과 (--format json 과 같은 내용)"""
    params = params or {}
    result = _execute(command, params)
    return {"command": result.command, "data": result.data}


@router.post("/{command}/text", response_class=PlainTextResponse)
def run_command_text(command: str, params: Optional[Dict[str, Any]] = Body(default=None)):
    params = params or {}
    result = _execute(command, params)
    return render(result, params.get("format", "table"))

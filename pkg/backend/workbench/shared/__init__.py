# backend/workbench/shared/__init__.py
"""Workbench Shared Services"""

from .config import settings, resolve_cap
from .error_handler import error_handler, ErrorSeverity
from .metrics import metrics

__all__ = [
    'settings',
    'resolve_cap',
    'error_handler',
    'ErrorSeverity',
    'metrics',
]

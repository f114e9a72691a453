# backend/routers/__init__.py
from . import lab

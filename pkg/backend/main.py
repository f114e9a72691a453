# backend/main.py - workbench HTTP 서버

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import logging
import os
import sys

# 버퍼링 비활성화 - 로그 즉시 출력
sys.stdout = sys.stderr = sys.__stdout__

# Local imports
from storage import ensure_directories
from constants import COMMANDS
from routers import lab
from workbench.shared.config import settings

logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)

# Create FastAPI app
app = FastAPI(
    title="Group Cellular Automata Workbench",
    description="Cellular automata over finitely generated groups and their quotients",
    version="1.0.0"
)

origins = [
    "http://localhost:3000",
    "http://127.0.0.1:3000",
    "http://localhost:8000",
    "http://127.0.0.1:8000",
]

if os.getenv("FRONTEND_URL"):
    origins.append(os.getenv("FRONTEND_URL"))

if os.getenv("DEVELOPMENT_MODE") == "true":
    origins.append("*")

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(lab.router, prefix="/api/lab", tags=["Lab"])


@app.get("/")
async def root():
    return {
        "message": "Group Cellular Automata Workbench API",
        "commands": COMMANDS,
        "version": "1.0.0"
    }


@app.get("/health")
async def health_check():
    return {"status": "healthy"}


@app.on_event("startup")
async def startup_event():
    print("[Startup] Initializing workbench...", flush=True)
    ensure_directories()
    print(f"[Startup] Caps: configurations {settings.configuration_cap}, patterns {settings.pattern_cap}", flush=True)
    print("[Startup] Application startup completed successfully", flush=True)


if __name__ == "__main__":
    import uvicorn
    uvicorn.run("main:app", host=settings.host, port=settings.port, reload=False)

import logging

from fastapi import FastAPI

import config as settings
from api.routes import router

logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO))

app = FastAPI(title="Resonance Transmission API", version=settings.TOOL_VERSION)
app.include_router(router)

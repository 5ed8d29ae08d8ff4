"""
Main FastAPI Application
Entry point for the qnlp-desk HTTP backend
"""

import logging
import os
import sys

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

# Add current directory to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import SERVER_CONFIG
from errors import QnlpError
from routes.toolkit_routes import router

logger = logging.getLogger(__name__)

app = FastAPI(
    title="qnlp-desk API",
    description="Desk-scale quantum NLP toolkit on a statevector simulator",
    version="1.0.0"
)

# Enable CORS for local frontends
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(router, prefix="/api", tags=["Quantum NLP"])


@app.exception_handler(QnlpError)
async def qnlp_error_handler(request: Request, exc: QnlpError) -> JSONResponse:
    """Domain errors become 422 responses naming the error class"""
    logger.warning("%s %s failed: %s: %s", request.method, request.url.path, type(exc).__name__, exc)
    return JSONResponse(status_code=422, content={"error": type(exc).__name__, "detail": str(exc)})


@app.on_event("startup")
async def startup_event():
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logger.info("qnlp-desk backend on http://%s:%d (docs at /docs)", SERVER_CONFIG["host"], SERVER_CONFIG["port"])


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "app:app",
        host=SERVER_CONFIG["host"],
        port=SERVER_CONFIG["port"],
        reload=SERVER_CONFIG["debug"]
    )

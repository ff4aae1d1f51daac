# rest_api_server.py
"""
REST API server for the soft classifier validation toolkit.

This script creates a FastAPI server that exposes the evaluation over HTTP:
upload a dataset, get the report back.

Requirements:
    pip install fastapi uvicorn python-multipart

Usage:
    uvicorn rest_api_server:app --host 0.0.0.0 --port 8000
"""

import logging
import os
from typing import Any, Dict, List, Optional

import uvicorn
from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.responses import Response
from pydantic import BaseModel, ValidationError

from api.softval_api import SoftValAPI
from config.softval_config import OPERATOR_CATALOG, REGRESSION_CATALOG, SOFTVAL_DEFAULTS, get_operators_in_order
from report_formats import MEDIA_TYPES
from softval import TOOL_NAME, __version__
from softval.errors import InputError, SoftValError
from softval.report_models import EvaluationConfig

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - [REST-API] %(message)s'
)
logger = logging.getLogger('rest_api')

# Create API instance
api = SoftValAPI()

# Create FastAPI app
app = FastAPI(
    title="Soft Classifier Validation API",
    description="REST API for evaluating soft classifiers against soft reference labels",
    version=__version__
)


# --- Pydantic Models ---

class InfoResponse(BaseModel):
    operators: Dict[str, str]
    measures: Dict[str, str]
    regression: List[str]
    dataset_formats: List[str]
    report_formats: List[str]
    defaults: Dict[str, Any]


class ErrorResponse(BaseModel):
    success: bool = False
    error: str


# --- Helper Functions ---

def _split(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


# --- API Routes ---

@app.get("/", tags=["Info"])
async def root():
    """Root endpoint with API information."""
    return {
        "name": "Soft Classifier Validation API",
        "tool": TOOL_NAME,
        "version": __version__,
        "documentation": "/docs",
        "endpoints": {
            "GET /info": "Available operators, measures and formats",
            "POST /evaluate": "Upload a CSV or JSON dataset and get the evaluation report"
        }
    }


@app.get("/info", response_model=InfoResponse, tags=["Info"])
async def get_info():
    """Get information about the available operators, measures and formats."""
    return {
        "operators": {key: OPERATOR_CATALOG[key]["name"] for key in get_operators_in_order()},
        "measures": api.available_measures,
        "regression": list(REGRESSION_CATALOG),
        "dataset_formats": ["csv", "json"],
        "report_formats": list(MEDIA_TYPES),
        "defaults": {key: SOFTVAL_DEFAULTS[key] for key in ("world", "operators", "measures", "id_column")},
    }


@app.post("/evaluate", responses={400: {"model": ErrorResponse}, 422: {"model": ErrorResponse}},
          tags=["Evaluation"])
async def evaluate(
    dataset: UploadFile = File(...),
    format: Optional[str] = Form(None),
    world: str = Form(SOFTVAL_DEFAULTS["world"]),
    operators: Optional[str] = Form(None),
    measures: Optional[str] = Form(None),
    regression: Optional[str] = Form(None),
    classes: Optional[str] = Form(None),
    group_by: Optional[str] = Form(None),
    id_column: str = Form(SOFTVAL_DEFAULTS["id_column"]),
    harden: Optional[str] = Form(None),
    curves: bool = Form(False),
    crisp_only: bool = Form(True),
    confusion: bool = Form(False),
    ideal: bool = Form(False),
    interclass: bool = Form(False),
    variance: bool = Form(False),
    out_format: str = Form("json"),
):
    """
    Evaluate an uploaded dataset.

    Form fields mirror the command line options; lists are comma separated.
    """
    try:
        if out_format not in MEDIA_TYPES:
            raise HTTPException(status_code=400, detail=f"Unknown report format '{out_format}'")
        fmt = format or os.path.splitext(dataset.filename or "")[1].lstrip(".").lower() or "csv"

        fields = dict(world=world, classes=_split(classes), hardening=harden or None, curves=curves,
                      crisp_only=crisp_only, confusion=confusion, ideal=ideal, interclass=interclass,
                      variance=variance)
        for name, value in (("operators", operators), ("measures", measures), ("regression", regression)):
            if value is not None:
                fields[name] = _split(value)
        config = EvaluationConfig(**fields)

        data = await dataset.read()
        logger.info(f"Evaluating upload {dataset.filename} ({len(data)} bytes)")
        report = api.evaluate_bytes(data, fmt, config, _split(group_by) or (), id_column,
                                    source=dataset.filename or "upload")
        return Response(content=api.render(report, out_format), media_type=MEDIA_TYPES[out_format])

    except HTTPException:
        raise
    except ValidationError as e:
        raise HTTPException(status_code=400, detail=f"Invalid options: {e}")
    except InputError as e:
        raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")
    except SoftValError as e:
        raise HTTPException(status_code=422, detail=f"{type(e).__name__}: {e}")
    except Exception as e:
        logger.error(f"Error in evaluation: {e}")
        raise HTTPException(status_code=500, detail=f"Internal server error: {e}")


# --- Main Entry Point ---
if __name__ == "__main__":
    port = int(os.environ.get("PORT", 8000))
    host = os.environ.get("HOST", "0.0.0.0")

    print(f"\n--- Soft Classifier Validation API Server ---")
    print(f"Starting server on http://{host}:{port}")
    print(f"API documentation: http://{host}:{port}/docs")
    print(f"Press Ctrl+C to stop the server")

    uvicorn.run(app, host=host, port=port)

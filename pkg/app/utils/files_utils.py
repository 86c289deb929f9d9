"""Output writers shared by the tools: JSON reports, CSV tables and run manifests."""

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd
from pydantic import BaseModel

from app.config import OUTPUT_ROOT, AppConfig
from app.logger import logger


# File writes from concurrent tools are serialized
_write_lock = threading.Lock()


def resolve_output_dir(out: Optional[Union[str, Path]], default: str) -> Path:
    """`out` if given, otherwise OUTPUT_ROOT/default; created on demand."""
    path = Path(out) if out else OUTPUT_ROOT / default
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: Union[str, Path], payload: Union[BaseModel, Dict[str, Any], list]) -> Path:
    path = Path(path)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, default=_jsonable)
    with _write_lock:
        path.write_text(text + "\n", encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path


def write_csv(path: Union[str, Path], frame: pd.DataFrame) -> Path:
    path = Path(path)
    with _write_lock:
        frame.to_csv(path, index=False, float_format="%.12g")
    logger.debug(f"Wrote {path} ({len(frame)} rows)")
    return path


def write_manifest(
    out: Path,
    command: str,
    settings: AppConfig,
    scene: Optional[str] = None,
    seed: Optional[int] = None,
    files: Optional[list] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """manifest.json: what ran, on which scene, with which configuration."""
    manifest = {
        "command": command,
        "scene": scene,
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "files": sorted(Path(f).name for f in files or []),
        "config": settings.model_dump(),
        **(extra or {}),
    }
    return write_json(out / "manifest.json", manifest)


def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")

"""Scene documents: a damping shape plus the field and analysis options built on it."""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, PositiveFloat, ValidationError

from app.config import AppConfig, config
from app.exceptions import DomainError, SceneError
from app.geometry.field import DampingField, ExponentOverride
from app.geometry.shapes import Shape, proper_projection_check
from app.logger import logger


class SceneConfig(BaseModel):
    """A validated scene.

    `options` holds dotted configuration overrides such as
    ``{"glancing.touch_tolerance": 1e-7}``; they apply to runs on this scene only.
    """

    name: str = "scene"
    description: str = ""
    shape: Shape
    beta: PositiveFloat = 9.0
    overrides: List[ExponentOverride] = Field(default_factory=list)
    profile: Literal["power", "indicator"] = "power"
    amplitude: PositiveFloat = 1.0
    support_cutoff: Optional[PositiveFloat] = None
    options: Dict[str, Union[float, int, str]] = Field(default_factory=dict)
    output_dir: Optional[str] = None

    def field(self, beta: Optional[float] = None) -> DampingField:
        return DampingField(
            shape=self.shape,
            beta=self.beta if beta is None else beta,
            overrides=self.overrides,
            support_cutoff=self.support_cutoff,
            profile=self.profile,
            amplitude=self.amplitude,
            name=self.name,
        )

    def settings(self, extra: Optional[Dict[str, Any]] = None) -> AppConfig:
        """Configuration with the scene options, then `extra`, applied on top."""
        merged = {**self.options, **(extra or {})}
        try:
            return config.override(merged)
        except KeyError as e:
            raise SceneError(str(e.args[0])) from e
        except ValidationError as e:
            raise SceneError(f"Invalid option value: {e.errors()[0]['msg']}") from e


def parse_scene(data: Dict[str, Any], source: str = "<scene>") -> SceneConfig:
    try:
        scene = SceneConfig.model_validate(data)
    except DomainError as e:
        raise SceneError(f"{source}: {e.message}") from e
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise SceneError(f"{source}: {where}: {first['msg']}") from e
    # option keys and values are validated up front
    scene.settings()
    if not proper_projection_check(scene.shape):
        raise SceneError(f"{source}: shape is not properly projected onto the torus")
    return scene


def load_scene(path: Union[str, Path]) -> SceneConfig:
    """Read and validate a scene JSON document."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise SceneError(f"Scene file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise SceneError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise SceneError(f"{path}: a scene must be a JSON object")
    scene = parse_scene(data, source=str(path))
    logger.info(f"Loaded scene '{scene.name}' ({scene.shape.kind}) from {path}")
    return scene

import asyncio
import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from app.config import AppConfig
from app.geometry.scene import SceneConfig, load_scene
from app.logger import logger


class ToolResult(BaseModel):
    """Represents the result of a tool execution."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    output: Any = Field(default=None)
    error: Optional[str] = Field(default=None)
    files: List[str] = Field(default_factory=list)
    exit_code: int = Field(default=0)


class ToolFailure(ToolResult):
    """A ToolResult that represents a failure."""

    exit_code: int = 1


class BaseTool(ABC, BaseModel):
    """Base class for the analysis subcommands.

    Attributes:
        name (str): Subcommand name
        description (str): Help text shown by the CLI
        parameters (dict): JSON schema of the keyword arguments of `execute`
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    description: str
    parameters: Optional[dict] = None

    async def __call__(self, **kwargs) -> Any:
        """Execute the tool with given parameters."""
        return await self.execute(**kwargs)

    @abstractmethod
    async def execute(self, **kwargs) -> Any:
        """Execute the tool with given parameters."""

    @property
    def summary(self) -> str:
        """First sentence of the description, for the subcommand list."""
        text = " ".join(self.description.split())
        return text.split(". ")[0].rstrip(".")

    def missing_arguments(self, tool_input: Dict[str, Any]) -> List[str]:
        required = (self.parameters or {}).get("required", [])
        return [key for key in required if tool_input.get(key) is None]

    @staticmethod
    async def run_blocking(func: Callable, *args, **kwargs) -> Any:
        """Run CPU-bound work off the event loop."""
        return await asyncio.to_thread(func, *args, **kwargs)

    @staticmethod
    def load(scene: Union[str, Path], tol: Optional[Dict[str, Any]] = None) -> tuple[SceneConfig, AppConfig]:
        """Scene plus its effective configuration (scene options, then `tol`)."""
        loaded = load_scene(scene)
        return loaded, loaded.settings(tol)

    def success_response(
        self, data: Union[Dict[str, Any], str], files: Optional[List[Path]] = None
    ) -> ToolResult:
        """Create a successful tool result.

        Args:
            data: Result data (dictionary or string)
            files: Paths written by the tool

        Returns:
            ToolResult with the formatted output
        """
        text = data if isinstance(data, str) else json.dumps(data, indent=2)
        logger.debug(f"{self.name}: wrote {len(files or [])} files")
        return ToolResult(output=text, files=[str(f) for f in files or []])

    def fail_response(self, msg: str, exit_code: int = 1) -> ToolResult:
        """Create a failed tool result.

        Args:
            msg: Error message describing the failure
            exit_code: Process exit code for the CLI

        Returns:
            ToolFailure with the error message
        """
        logger.debug(f"Tool {self.name} failed: {msg}")
        return ToolFailure(error=msg, exit_code=exit_code)

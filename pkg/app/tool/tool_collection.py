"""Dispatch of CLI subcommands to their tools."""
from typing import Any, Dict, List, Optional

from app.exceptions import GlanceError
from app.logger import logger
from app.tool.base import BaseTool, ToolFailure, ToolResult


class ToolCollection:
    """The subcommand tools, keyed by name."""

    def __init__(self, *tools: BaseTool):
        self.tools = tools
        self.tool_map = {tool.name: tool for tool in tools}

    @property
    def names(self) -> List[str]:
        return [tool.name for tool in self.tools]

    async def execute(
        self, *, name: str, tool_input: Optional[Dict[str, Any]] = None
    ) -> ToolResult:
        """Run one tool; errors become a ToolFailure carrying the process exit code."""
        tool = self.tool_map.get(name)
        if not tool:
            return ToolFailure(error=f"Tool {name} is invalid", exit_code=2)
        tool_input = tool_input or {}
        missing = tool.missing_arguments(tool_input)
        if missing:
            return tool.fail_response(f"{name} needs {', '.join(missing)}", exit_code=2)
        try:
            return await tool(**tool_input)
        except GlanceError as e:
            logger.error(f"{name}: {e.message}")
            return ToolFailure(error=e.message, exit_code=e.exit_code)

    def get_tool(self, name: str) -> BaseTool:
        return self.tool_map.get(name)

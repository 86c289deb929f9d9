from app.tool.analyze import AnalyzeTool
from app.tool.average import AverageTool
from app.tool.base import BaseTool, ToolFailure, ToolResult
from app.tool.genericity import GenericityTool
from app.tool.predict import PredictTool
from app.tool.resolvent import ResolventTool
from app.tool.simulate import SimulateTool
from app.tool.tool_collection import ToolCollection


__all__ = [
    "AnalyzeTool",
    "AverageTool",
    "BaseTool",
    "GenericityTool",
    "PredictTool",
    "ResolventTool",
    "SimulateTool",
    "ToolCollection",
    "ToolFailure",
    "ToolResult",
]

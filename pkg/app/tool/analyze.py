from typing import Any, Dict, Optional

import pandas as pd

from app.analysis.glancing import glancing_report
from app.schema import GlancingReport
from app.tool.base import BaseTool, ToolResult
from app.utils.files_utils import resolve_output_dir, write_csv, write_json, write_manifest


_ANALYZE_DESCRIPTION = """Find the glancing lines and glancing points of a scene's damping set,
classify them one- or two-sided and estimate the order of every point."""


def report_frame(report: GlancingReport) -> pd.DataFrame:
    """One row per glancing point; lines without points get a row of their own."""
    rows = []
    for line in report.lines:
        base = {
            "direction": str(line.direction),
            "s_offset": line.s_offset,
            "line": line.sided.value,
        }
        if not line.touch_points:
            rows.append(base)
        for point in line.touch_points:
            rows.append(
                {
                    **base,
                    "x": point.location.x,
                    "y": point.location.y,
                    "contact": point.contact,
                    "point": point.sided.value,
                    "order": point.order,
                    "status": point.order_status.value,
                    "exponent": point.damping_exponent,
                    "exponent_plus": point.side_exponents.get(1),
                    "exponent_minus": point.side_exponents.get(-1),
                }
            )
    columns = [
        "direction", "s_offset", "line", "x", "y", "contact", "point",
        "order", "status", "exponent", "exponent_plus", "exponent_minus",
    ]
    return pd.DataFrame(rows, columns=columns)


def render_report(report: GlancingReport) -> str:
    counts = report.counts()
    header = (
        f"{report.shape_id} ({report.shape_kind}): inradius {report.inradius:.6g}, "
        f"{len(report.candidate_directions)} candidate directions\n"
        f"{counts['directions']} glancing directions, {counts['lines']} lines "
        f"({counts['one_sided_lines']} one-sided, {counts['two_sided_lines']} two-sided), "
        f"{counts['points']} points"
    )
    if report.G_empty:
        return header + "\nno glancing lines: geometric control holds"
    return header + "\n" + report_frame(report).to_string(index=False)


class AnalyzeTool(BaseTool):
    name: str = "analyze"
    description: str = _ANALYZE_DESCRIPTION
    parameters: dict = {
        "type": "object",
        "properties": {
            "scene": {"type": "string", "description": "Path of the scene JSON document"},
            "out": {"type": "string", "description": "Output directory"},
            "tol": {"type": "object", "description": "Dotted configuration overrides"},
            "seed": {"type": "integer"},
        },
        "required": ["scene"],
    }

    async def execute(
        self,
        scene: str,
        out: Optional[str] = None,
        tol: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        **_,
    ) -> ToolResult:
        loaded, settings = self.load(scene, tol)
        report = await self.run_blocking(glancing_report, loaded.field(), settings, loaded.name)
        out_dir = resolve_output_dir(out or loaded.output_dir, f"{loaded.name}/analyze")
        files = [
            write_json(out_dir / "glancing_report.json", report),
            write_csv(out_dir / "glancing_points.csv", report_frame(report)),
        ]
        files.append(
            write_manifest(
                out_dir, self.name, settings, scene=scene, seed=seed, files=files,
                extra={"counts": report.counts(), "G_empty": report.G_empty},
            )
        )
        return self.success_response(render_report(report), files)

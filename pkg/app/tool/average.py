from typing import Any, Dict, List, Optional

from app.analysis.averaging import average_direction, fit_zero_set, fubini_check, zero_set
from app.analysis.glancing import find_glancing_lines
from app.config import AppConfig
from app.geometry.field import DampingField
from app.geometry.torus import DirectionFrame, RationalDirection
from app.logger import logger
from app.tool.base import BaseTool, ToolResult
from app.utils.files_utils import resolve_output_dir, write_csv, write_json, write_manifest


_AVERAGE_DESCRIPTION = """Average the damping along the closed geodesics of one direction, locate
the zero set of the average and fit its vanishing exponents."""


def average_one(field: DampingField, direction: RationalDirection, settings: AppConfig) -> dict:
    frame = DirectionFrame(direction=direction)
    lines = find_glancing_lines(field.damping_shape, direction, settings=settings.glancing)
    profile = average_direction(field, frame, lines, settings.averaging)
    zeros = zero_set(profile, lines, settings.averaging, settings.glancing.s_tolerance)
    fits = fit_zero_set(profile, zeros, settings.averaging)
    mass = fubini_check(field, frame, settings=settings.averaging)
    return {"profile": profile, "zeros": zeros, "fits": fits, "mass": mass}


class AverageTool(BaseTool):
    name: str = "average"
    description: str = _AVERAGE_DESCRIPTION
    parameters: dict = {
        "type": "object",
        "properties": {
            "scene": {"type": "string"},
            "direction": {"type": "string", "description": "Direction as p,q (default 1,0)"},
            "out": {"type": "string"},
            "tol": {"type": "object"},
            "seed": {"type": "integer"},
        },
        "required": ["scene"],
    }

    async def execute(
        self,
        scene: str,
        direction: Optional[str] = None,
        out: Optional[str] = None,
        tol: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        **_,
    ) -> ToolResult:
        loaded, settings = self.load(scene, tol)
        v = RationalDirection.parse(direction or "1,0")
        field = loaded.field()
        result = await self.run_blocking(average_one, field, v, settings)

        stem = f"{v.p}_{v.q}".replace("-", "m")
        out_dir = resolve_output_dir(out or loaded.output_dir, f"{loaded.name}/average")
        zeros, fits, mass = result["zeros"], result["fits"], result["mass"]
        summary = {
            "direction": str(v),
            "zero_set": zeros.model_dump(),
            "fits": [fit.summary() for fit in fits],
            "fubini": {**mass.model_dump(), "passed": mass.passed},
        }
        files = [
            write_csv(out_dir / f"profile_{stem}.csv", result["profile"].to_frame()),
            write_json(out_dir / f"zero_set_{stem}.json", summary),
        ]
        files.append(write_manifest(out_dir, self.name, settings, scene=scene, seed=seed, files=files))
        if not mass.passed:
            logger.warning(f"Mass check along {v} failed: relative error {mass.relative_error:.2e}")

        lines: List[str] = [
            f"{loaded.name} along {v}: {len(zeros.intervals)} zero intervals, {len(zeros.points)} isolated zeros",
            f"mass check: relative error {mass.relative_error:.2e} against {mass.reference}",
        ]
        for fit in fits:
            lo, hi = fit.interval
            lines.append(
                f"  edge s={fit.edge:.9g} side {fit.side:+d}: exponent {fit.exponent:.4f} "
                f"[{lo:.4f}, {hi:.4f}]"
            )
        return self.success_response("\n".join(lines), files)

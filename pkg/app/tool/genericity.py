from typing import Any, Dict, Optional

from app.exceptions import DomainError
from app.genericity.curve import curve_exceptional_rotation_set, curve_in_Y
from app.genericity.polygon import polygon_exceptional_rotations, polygon_membership
from app.geometry.curves import ParametricShape
from app.geometry.polygon import Polygon
from app.tool.base import BaseTool, ToolResult
from app.utils.files_utils import resolve_output_dir, write_csv, write_json, write_manifest


_GENERICITY_DESCRIPTION = """Decide whether a polygon or smooth boundary is generic, i.e. all its
glancing points have order 1 (polygons) or 2 (curves), and list the rotations
that break genericity."""


class GenericityTool(BaseTool):
    name: str = "genericity"
    description: str = _GENERICITY_DESCRIPTION
    parameters: dict = {
        "type": "object",
        "properties": {
            "scene": {"type": "string"},
            "mode": {"type": "string", "enum": ["polygon", "curve"]},
            "out": {"type": "string"},
            "tol": {"type": "object"},
            "seed": {"type": "integer"},
        },
        "required": ["scene"],
    }

    async def execute(
        self,
        scene: str,
        mode: Optional[str] = None,
        out: Optional[str] = None,
        tol: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        **_,
    ) -> ToolResult:
        loaded, settings = self.load(scene, tol)
        shape = loaded.shape
        mode = mode or ("polygon" if isinstance(shape, Polygon) else "curve")
        seed = settings.runtime.seed if seed is None else seed

        if mode == "polygon":
            if not isinstance(shape, Polygon):
                raise DomainError(f"polygon mode needs a polygon scene, got '{shape.kind}'")
            membership = await self.run_blocking(
                polygon_membership, shape, settings.genericity, seed
            )
            diagnostics = await self.run_blocking(
                polygon_exceptional_rotations, shape, membership.membership.candidates
            )
            document = {"membership": membership.model_dump(), "rotations": diagnostics.model_dump()}
            headline = f"{loaded.name}: {membership.label}"
            witness = membership.membership.witness
            if witness is not None:
                headline += f" ({witness})"
            headline += f"; {len(diagnostics.angles)} exceptional rotations (mod pi)"
        elif mode == "curve":
            if not isinstance(shape, ParametricShape):
                raise DomainError(f"curve mode needs a smooth boundary, got '{shape.kind}'")
            membership = await self.run_blocking(curve_in_Y, shape, None, settings.genericity)
            diagnostics = await self.run_blocking(
                curve_exceptional_rotation_set, shape, None, None, settings.genericity
            )
            document = {"membership": membership.model_dump(), "rotations": diagnostics.model_dump()}
            headline = (
                f"{loaded.name}: {membership.status} (min f = {membership.min_f:.4g} "
                f"at t = {membership.argmin:.6g}); exceptional cover measure "
                f"{diagnostics.measure:.4g}, history {diagnostics.measure_history}"
            )
        else:
            raise DomainError(f"unknown genericity mode '{mode}', expected polygon or curve")

        out_dir = resolve_output_dir(out or loaded.output_dir, f"{loaded.name}/genericity")
        files = [
            write_json(out_dir / "genericity.json", document),
            write_csv(out_dir / "rotations.csv", diagnostics.to_frame()),
        ]
        files.append(
            write_manifest(out_dir, self.name, settings, scene=scene, seed=seed, files=files, extra={"mode": mode})
        )
        return self.success_response(headline, files)

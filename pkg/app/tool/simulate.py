from typing import Any, Dict, List, Optional

import pandas as pd

from app.analysis.glancing import find_glancing_lines
from app.config import config
from app.exceptions import DomainError
from app.geometry.torus import DirectionFrame, RationalDirection
from app.simulation.wave import beam_separation, deepest_offset, gaussian_beam, run_beams, run_comparison
from app.tool.base import BaseTool, ToolResult
from app.utils.files_utils import resolve_output_dir, write_csv, write_json, write_manifest


_SIMULATE_DESCRIPTION = """Run the finite-difference damped wave equation for one or more scenes
from the same Gaussian beam and record the energy traces. The comparison is
qualitative: polynomial decay rates are not resolved at these times."""


class SimulateTool(BaseTool):
    name: str = "simulate"
    description: str = _SIMULATE_DESCRIPTION
    parameters: dict = {
        "type": "object",
        "properties": {
            "scenes": {"type": "array", "items": {"type": "string"}},
            "final_time": {"type": "number"},
            "grid_size": {"type": "integer"},
            "direction": {"type": "string", "description": "Beam direction p,q"},
            "beam_offset": {
                "type": "number",
                "description": "Transverse offset of the beam; defaults to the first glancing line",
            },
            "undamped": {"type": "boolean", "description": "Add a W = 0 reference run"},
            "damped_direction": {
                "type": "string",
                "description": "Also launch a beam p,q through the deepest damping and report the separation",
            },
            "out": {"type": "string"},
            "tol": {"type": "object"},
            "seed": {"type": "integer"},
        },
        "required": ["scenes"],
    }

    async def execute(
        self,
        scenes: Optional[List[str]] = None,
        final_time: Optional[float] = None,
        grid_size: Optional[int] = None,
        direction: Optional[str] = None,
        beam_offset: Optional[float] = None,
        undamped: bool = False,
        damped_direction: Optional[str] = None,
        out: Optional[str] = None,
        tol: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        **_,
    ) -> ToolResult:
        scenes = scenes or []
        if not scenes and not undamped:
            raise DomainError("simulate needs at least one scene or --undamped")
        loaded = [self.load(path, tol) for path in scenes]
        settings = loaded[0][1] if loaded else config.override(tol or {})
        updates = {
            key: value
            for key, value in (("final_time", final_time), ("grid_size", grid_size))
            if value is not None
        }
        simulation = settings.simulation.model_copy(update=updates)
        settings = settings.model_copy(update={"simulation": simulation})

        frame = DirectionFrame(direction=RationalDirection.parse(direction or "1,0"))
        if beam_offset is None:
            beam_offset = 0.0
            if loaded:
                lines = find_glancing_lines(loaded[0][0].shape, frame.direction, settings=settings.glancing)
                if lines:
                    beam_offset = lines[0].s_offset
        data = gaussian_beam(frame, beam_offset, simulation.grid_size)

        fields: Dict[str, Any] = {scene.name: scene.field() for scene, _ in loaded}
        if undamped:
            fields["undamped"] = 0.0
        traces = await self.run_blocking(run_comparison, fields, data, simulation.final_time, simulation)
        separations: Dict[str, float] = {}
        if damped_direction is not None:
            if not loaded:
                raise DomainError("--damped-direction needs a scene")
            damped_frame = DirectionFrame(direction=RationalDirection.parse(damped_direction))
            for scene, _ in loaded:
                field = scene.field()
                offset = deepest_offset(field, damped_frame, simulation.grid_size)
                beams = {
                    f"{scene.name}-glancing": data,
                    f"{scene.name}-damped": gaussian_beam(damped_frame, offset, simulation.grid_size),
                }
                slow, fast = await self.run_blocking(
                    run_beams, field, beams, simulation.final_time, simulation
                )
                separations[scene.name] = beam_separation(slow, fast)
                traces += [slow, fast]

        out_dir = resolve_output_dir(out, "simulate")
        files = [write_csv(out_dir / f"energy_{trace.label}.csv", trace.to_frame()) for trace in traces]
        summary = pd.DataFrame(
            {
                "label": [t.label for t in traces],
                "E0": [float(t.energies[0]) for t in traces],
                "E_final": [float(t.energies[-1]) for t in traces],
                "ratio": [t.final_ratio for t in traces],
                "max_increase": [t.max_increase for t in traces],
            }
        )
        files.append(
            write_json(
                out_dir / "runs.json",
                {
                    "initial": data.description,
                    "grid_size": simulation.grid_size,
                    "dt": traces[0].dt,
                    "final_time": simulation.final_time,
                    "runs": summary.to_dict(orient="records"),
                    "separation": separations,
                },
            )
        )
        files.append(
            write_manifest(
                out_dir, self.name, settings, scene=",".join(scenes) or None, seed=seed, files=files
            )
        )
        text = f"{data.description}\n{summary.to_string(index=False)}"
        for name, ratio in separations.items():
            text += f"\n{name}: glancing beam keeps {ratio:.3g}x the energy of the damped beam"
        return self.success_response(text, files)

from typing import Any, Dict, List, Optional

from app.analysis.glancing import glancing_report
from app.predict.decay import DecayPrediction, predict, rate_table
from app.tool.base import BaseTool, ToolResult
from app.utils.files_utils import resolve_output_dir, write_csv, write_json, write_manifest


_PREDICT_DESCRIPTION = """Predict the polynomial energy-decay exponent alpha of the damped wave
equation from the glancing geometry of a scene."""


def render_prediction(name: str, prediction: DecayPrediction) -> str:
    lines = [f"{name}: {prediction.regime.value}, energy decays like {prediction.rate}"]
    if prediction.alpha is not None:
        lines.append(f"alpha = {prediction.alpha:.10g}")
    for entry in prediction.directions:
        lines.append(f"  {entry.direction}: beta_v={entry.beta_v} gamma_v={entry.gamma_v}")
    lines.extend(f"warning: {w}" for w in prediction.warnings)
    return "\n".join(lines)


class PredictTool(BaseTool):
    name: str = "predict"
    description: str = _PREDICT_DESCRIPTION
    parameters: dict = {
        "type": "object",
        "properties": {
            "scene": {"type": "string"},
            "betas": {
                "type": "array",
                "items": {"type": "number"},
                "description": "Also tabulate alpha for the strip, disk and polygon cases",
            },
            "out": {"type": "string"},
            "tol": {"type": "object"},
            "seed": {"type": "integer"},
        },
        "required": ["scene"],
    }

    async def execute(
        self,
        scene: str,
        betas: Optional[List[float]] = None,
        out: Optional[str] = None,
        tol: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        **_,
    ) -> ToolResult:
        loaded, settings = self.load(scene, tol)
        field = loaded.field()
        report = await self.run_blocking(glancing_report, field, settings, loaded.name)
        prediction = predict(report, field)

        out_dir = resolve_output_dir(out or loaded.output_dir, f"{loaded.name}/predict")
        files = [write_json(out_dir / "prediction.json", prediction)]
        text = render_prediction(loaded.name, prediction)
        if betas:
            table = rate_table(betas)
            files.append(write_csv(out_dir / "rates.csv", table))
            text += "\n" + table.to_string(index=False)
        files.append(write_manifest(out_dir, self.name, settings, scene=scene, seed=seed, files=files))
        return self.success_response(text, files)

from typing import Any, Dict, Optional

import numpy as np

from app.analysis.averaging import average_along
from app.config import AppConfig, config
from app.exceptions import DomainError
from app.geometry.torus import DirectionFrame, RationalDirection
from app.resolvent.operator import build_operator, pairing_check
from app.resolvent.scan import (
    PotentialFactory,
    fit_scaling,
    fixture_factory,
    lambda_grid,
    profile_factory,
    resolvent_scan,
)
from app.tool.base import BaseTool, ToolResult
from app.utils.files_utils import resolve_output_dir, write_csv, write_json, write_manifest


_RESOLVENT_DESCRIPTION = """Sweep sup over E of the 1D damped resolvent norm across a lambda grid and
fit its power law in lambda. Potentials come from a fixture family or from a
scene's directional average."""

PAIRING_GRID = 512


def pairing_trials(factory: PotentialFactory, lambdas, trials: int, seed: int) -> Dict[str, Any]:
    """First pairing inequality on random forcings, energies and lambdas."""
    rng = np.random.default_rng(seed)
    potential = factory(PAIRING_GRID)
    violations, worst = 0, 0.0
    for _ in range(trials):
        lam = float(rng.choice(lambdas))
        energy = float(rng.uniform(-10.0, 4.0 * PAIRING_GRID))
        f = rng.standard_normal(PAIRING_GRID) + 1j * rng.standard_normal(PAIRING_GRID)
        report = pairing_check(build_operator(potential, factory.length, lam, energy), f)
        violations += not report.first_holds
        worst = max(worst, report.damped_norm / report.pairing_bound)
    return {"trials": trials, "violations": violations, "worst_ratio": worst}


def _factory(family: str, exponent: float, scene, direction, settings: AppConfig):
    if family != "profile":
        return fixture_factory(family, exponent, settings.resolvent)
    if scene is None:
        raise DomainError("the profile family needs --scene")
    frame = DirectionFrame(direction=RationalDirection.parse(direction or "1,0"))
    profile = average_along(scene.field(), frame, settings=settings.averaging)
    return profile_factory(profile, settings.resolvent.circumference), None


class ResolventTool(BaseTool):
    name: str = "resolvent"
    description: str = _RESOLVENT_DESCRIPTION
    parameters: dict = {
        "type": "object",
        "properties": {
            "family": {"type": "string", "enum": ["constant", "point", "interval", "profile"]},
            "exponent": {"type": "number", "description": "gamma for point, beta for interval"},
            "scene": {"type": "string", "description": "Scene for the profile family"},
            "direction": {"type": "string"},
            "lambda_min": {"type": "number"},
            "lambda_max": {"type": "number"},
            "lambda_points": {"type": "integer"},
            "trials": {"type": "integer", "description": "Random pairing checks"},
            "out": {"type": "string"},
            "tol": {"type": "object"},
            "seed": {"type": "integer"},
        },
        "required": ["family"],
    }

    async def execute(
        self,
        family: str = "point",
        exponent: float = 2.0,
        scene: Optional[str] = None,
        direction: Optional[str] = None,
        lambda_min: Optional[float] = None,
        lambda_max: Optional[float] = None,
        lambda_points: Optional[int] = None,
        trials: int = 100,
        out: Optional[str] = None,
        tol: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        **_,
    ) -> ToolResult:
        loaded = None
        if scene is not None:
            loaded, settings = self.load(scene, tol)
        else:
            settings = config.override(tol or {})
        updates = {
            key: value
            for key, value in (
                ("lambda_min", lambda_min),
                ("lambda_max", lambda_max),
                ("lambda_points", lambda_points),
            )
            if value is not None
        }
        resolvent = settings.resolvent.model_copy(update=updates)
        if resolvent.lambda_min >= resolvent.lambda_max:
            raise DomainError("lambda-min must be below lambda-max")
        settings = settings.model_copy(update={"resolvent": resolvent})
        seed = settings.runtime.seed if seed is None else seed
        factory, expected = _factory(family, exponent, loaded, direction, settings)
        label = family if family in ("constant", "profile") else f"{family}-{exponent:g}"
        lambdas = lambda_grid(resolvent)
        scan = await self.run_blocking(resolvent_scan, factory, lambdas, label, settings, expected)
        strict = len(lambdas) >= 8 and lambdas.max() / lambdas.min() >= 100.0
        fit = fit_scaling(scan, expected=expected, strict=strict)
        pairing = await self.run_blocking(pairing_trials, factory, lambdas, trials, seed)

        out_dir = resolve_output_dir(out, f"resolvent/{label}")
        document = {
            "label": label,
            "circumference": factory.length,
            "fit": fit.model_dump(),
            "strict_fit": strict,
            "pairing": pairing,
        }
        files = [
            write_csv(out_dir / "scan.csv", scan.to_frame()),
            write_json(out_dir / "fit.json", document),
        ]
        files.append(write_manifest(out_dir, self.name, settings, scene=scene, seed=seed, files=files))

        text = scan.to_frame().to_string(index=False)
        expected_text = "" if expected is None else f" (expected {expected:.4f})"
        text += f"\nfitted exponent {fit.exponent:.4f}{expected_text}, residual {fit.residual:.2e}"
        if pairing["violations"]:
            text += f"\npairing inequality violated in {pairing['violations']} of {trials} trials"
        return self.success_response(text, files)

import os
import threading
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt


def get_project_root() -> Path:
    """Get the project root directory"""
    return Path(__file__).resolve().parent.parent


PROJECT_ROOT = get_project_root()
OUTPUT_ROOT = PROJECT_ROOT / "output"

load_dotenv(PROJECT_ROOT / ".env")


class GlancingSettings(BaseModel):
    s_resolution: PositiveFloat = Field(
        1e-3, description="m(s) scan spacing as a fraction of the s-circle"
    )
    s_tolerance: PositiveFloat = Field(1e-9, description="Line offset tolerance")
    miss_tolerance: PositiveFloat = Field(
        1e-12, description="Max depth m(s) along a line below which it misses omega"
    )
    touch_tolerance: PositiveFloat = Field(
        1e-6, description="Distance below which a line touches the boundary"
    )
    chart_scale: PositiveFloat = Field(
        1e-2, description="Chart radius relative to the local feature size"
    )
    order_scales: PositiveInt = Field(12, description="Dyadic scales for order fits")
    order_slope_tolerance: PositiveFloat = Field(
        0.05, description="Slope stability across consecutive scales"
    )


class ShapeSettings(BaseModel):
    boundary_samples: PositiveInt = Field(
        2048, description="Dense boundary samples seeding closest-point search"
    )
    golden_iterations: PositiveInt = Field(
        64, description="Golden-section iterations of closest-point refinement"
    )
    analytic_tolerance: PositiveFloat = Field(
        1e-10, description="Boundary band for analytic shapes"
    )
    sampled_tolerance: PositiveFloat = Field(
        1e-8, description="Boundary band for sampled curves"
    )


class AveragingSettings(BaseModel):
    relative_tolerance: PositiveFloat = Field(
        1e-10, description="Adaptive quadrature relative agreement"
    )
    max_rounds: PositiveInt = Field(40, description="Adaptive bisection rounds")
    zero_tolerance: PositiveFloat = Field(
        1e-12, description="Zero threshold relative to max A_v"
    )
    fit_scales: PositiveInt = Field(12, description="Dyadic scales near a component")
    fit_window: PositiveFloat = Field(
        0.1, description="Allowed spread of local slopes in a fit window"
    )
    profile_points: PositiveInt = Field(512, description="Default s-grid size")


class ResolventSettings(BaseModel):
    grid_size: PositiveInt = Field(4096, description="Minimum grid size N")
    circumference: PositiveFloat = Field(
        2 * 3.141592653589793, description="Circle length for point, constant and profile potentials"
    )
    interval_circumference: PositiveFloat = Field(
        8 * 3.141592653589793, description="Circle length for the interval-vanishing fixture"
    )
    layer_points: PositiveInt = Field(
        16, description="Grid points across the lambda^(-1/(b+2)) boundary layer"
    )
    tolerance: PositiveFloat = Field(1e-6, description="Inverse iteration tolerance")
    coarse_tolerance: PositiveFloat = Field(1e-3)
    max_iterations: PositiveInt = Field(400)
    max_restarts: PositiveInt = Field(5)
    e_min: float = Field(-10.0, description="Lower edge of the E sweep")
    e_cap: PositiveFloat = Field(1e8, description="Cap on the upper edge of the sweep")
    coarse_points: PositiveInt = Field(160)
    lambda_min: PositiveFloat = Field(1e2)
    lambda_max: PositiveFloat = Field(1e5)
    lambda_points: PositiveInt = Field(8)


class SimulationSettings(BaseModel):
    grid_size: PositiveInt = Field(256)
    cfl: PositiveFloat = Field(0.9, description="dt = cfl * h / sqrt(2)")
    final_time: PositiveFloat = Field(50.0)
    record_every: PositiveInt = Field(20)
    growth_limit: PositiveFloat = Field(10.0)
    damping_peak: Optional[PositiveFloat] = Field(
        None, description="Rescale the sampled W so its maximum equals this"
    )


class GenericitySettings(BaseModel):
    edge_tolerance: PositiveFloat = Field(
        1e-12, description="Relative tolerance for floating-point edges"
    )
    openness_perturbation: PositiveFloat = Field(1e-6)
    openness_trials: PositiveInt = Field(8)
    curve_samples: PositiveInt = Field(4096)
    max_refinements: PositiveInt = Field(4)


class RuntimeSettings(BaseModel):
    threads: PositiveInt = Field(4, description="Worker threads for direction scans")
    log_level: str = Field("INFO")
    output_dir: str = Field("output")
    seed: int = Field(0)


class AppConfig(BaseModel):
    glancing: GlancingSettings = Field(default_factory=GlancingSettings)
    shapes: ShapeSettings = Field(default_factory=ShapeSettings)
    averaging: AveragingSettings = Field(default_factory=AveragingSettings)
    resolvent: ResolventSettings = Field(default_factory=ResolventSettings)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    genericity: GenericitySettings = Field(default_factory=GenericitySettings)
    runtime: RuntimeSettings = Field(default_factory=RuntimeSettings)

    model_config = ConfigDict(arbitrary_types_allowed=True)


class Config:
    _instance = None
    _lock = threading.Lock()
    _initialized = False

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._initialized:
            with self._lock:
                if not self._initialized:
                    self._config = None
                    self._load_initial_config()
                    self._initialized = True

    @staticmethod
    def _get_config_path() -> Optional[Path]:
        root = PROJECT_ROOT
        config_path = root / "config" / "config.toml"
        if config_path.exists():
            return config_path
        example_path = root / "config" / "config.example.toml"
        if example_path.exists():
            return example_path
        return None

    def _load_config(self) -> dict:
        config_path = self._get_config_path()
        if config_path is None:
            return {}
        with config_path.open("rb") as f:
            return tomllib.load(f)

    def _load_initial_config(self):
        raw_config = self._load_config()

        runtime = dict(raw_config.get("runtime", {}))
        threads = os.getenv("GLANCE_THREADS")
        if threads:
            runtime["threads"] = int(threads)
        raw_config["runtime"] = runtime

        self._config = AppConfig(**raw_config)

    def override(self, overrides: Dict[str, Any]) -> AppConfig:
        """Return a copy of the configuration with dotted-key overrides applied.

        Args:
            overrides: mapping such as {"glancing.touch_tolerance": 1e-7}

        Returns:
            A validated AppConfig; the singleton itself is left untouched.
        """
        data = self._config.model_dump()
        for key, value in overrides.items():
            section, _, name = key.partition(".")
            if section not in data or name not in data[section]:
                raise KeyError(f"Unknown configuration key: {key}")
            data[section][name] = value
        return AppConfig(**data)

    @property
    def app(self) -> AppConfig:
        return self._config

    @property
    def glancing(self) -> GlancingSettings:
        return self._config.glancing

    @property
    def shapes(self) -> ShapeSettings:
        return self._config.shapes

    @property
    def averaging(self) -> AveragingSettings:
        return self._config.averaging

    @property
    def resolvent(self) -> ResolventSettings:
        return self._config.resolvent

    @property
    def simulation(self) -> SimulationSettings:
        return self._config.simulation

    @property
    def genericity(self) -> GenericitySettings:
        return self._config.genericity

    @property
    def runtime(self) -> RuntimeSettings:
        """Get the runtime settings (threads honour GLANCE_THREADS)"""
        return self._config.runtime


config = Config()

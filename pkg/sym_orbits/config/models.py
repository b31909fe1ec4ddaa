"""Configuration management for sym-orbits"""
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Any, Optional
import os
import yaml

JUPITER_EUROPA_MU = 2.5266448850435e-05
OUTPUT_ENV_VAR = "SYM_ORBITS_OUTPUT"


@dataclass
class ModelConfig:
    """Dynamical model preset"""
    kind: str = "crtbp"  # crtbp, hill
    mu: float = JUPITER_EUROPA_MU
    collision_radius: float = 1e-6

    @classmethod
    def preset(cls, name: str) -> 'ModelConfig':
        """Named presets: jupiter_europa, hill"""
        if name == "jupiter_europa":
            return cls(kind="crtbp", mu=JUPITER_EUROPA_MU)
        if name == "hill":
            return cls(kind="hill")
        raise ValueError(f"Unknown model preset: {name}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ModelConfig':
        """Build from {"kind": "crtbp", "mu": ...} or {"kind": "hill"}"""
        return cls(
            kind=data.get('kind', 'crtbp'),
            mu=data.get('mu', JUPITER_EUROPA_MU),
            collision_radius=data.get('collision_radius', 1e-6)
        )


@dataclass
class ToleranceConfig:
    """Integrator and corrector tolerances"""
    rtol: float = 1e-12
    atol: float = 1e-12
    event_tol: float = 1e-12
    newton_tol: float = 1e-11     # step size on unknowns
    residual_tol: float = 1e-10   # periodicity residual
    max_newton: int = 25
    max_step: float = 0.05        # trust region on a Newton step
    multiple_shooting_period: float = 8.0
    segments: int = 4


@dataclass
class ContinuationConfig:
    """Family continuation and branch switching"""
    initial_step: float = 1e-4
    min_step: float = 1e-8
    max_step: float = 1e-2
    max_points: int = 400
    easy_iterations: int = 4
    easy_streak: int = 3
    arclength_trigger: float = 0.1
    delta_window: float = 1e-4
    switch_amplitude: float = 1e-4
    switch_attempts: int = 6
    mu_start: float = 1e-7
    bisection_tol: float = 1e-10
    max_state_jump: float = 0.05  # max-norm distance between consecutive orbits
    kernel_tol: float = 1e-3      # singular value cut for bifurcation kernels
    k_max: int = 5                # highest cover searched for k-fold crossings


@dataclass
class WorkerPoolConfig:
    """Worker pool for parallel branch continuation"""
    max_workers: int = 4
    queue_size: int = 1000


@dataclass
class RunConfig:
    """Main configuration"""
    model: ModelConfig = field(default_factory=ModelConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    continuation: ContinuationConfig = field(default_factory=ContinuationConfig)
    workers: WorkerPoolConfig = field(default_factory=WorkerPoolConfig)
    output_dir: str = field(default_factory=lambda: os.environ.get(OUTPUT_ENV_VAR, "output"))
    fixtures: List[str] = field(default_factory=list)

    @classmethod
    def from_yaml(cls, path: str) -> 'RunConfig':
        """Load configuration from YAML file"""
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        """Build from a parsed mapping, section defaults for missing keys"""
        model_data = data.get('model', {})
        if isinstance(model_data, str):
            model = ModelConfig.preset(model_data)
        else:
            model = ModelConfig.from_dict(model_data)

        tolerances = _section(ToleranceConfig, data.get('tolerances', {}))
        continuation = _section(ContinuationConfig, data.get('continuation', {}))
        workers = _section(WorkerPoolConfig, data.get('workers', {}))

        return cls(
            model=model,
            tolerances=tolerances,
            continuation=continuation,
            workers=workers,
            output_dir=data.get('output_dir', os.environ.get(OUTPUT_ENV_VAR, "output")),
            fixtures=list(data.get('fixtures', []))
        )

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping of every section"""
        return asdict(self)

    def dump(self, path: str) -> None:
        """Write the full configuration as YAML"""
        with open(path, 'w') as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=False)


def _section(cls, data: Optional[Dict[str, Any]]):
    """Instantiate a section dataclass, rejecting unknown keys"""
    data = data or {}
    known = set(cls.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"Unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**data)

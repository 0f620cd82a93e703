"""Run configuration shared by the CLI and the scheme driver."""

from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .flux import FluxSpec
from .limiter import LimiterConfig
from .motion import SmoothingConfig


@dataclass
class RunConfig:
    case: str = "sod"
    boost: float = 0.0
    degree: int = 1
    cfl: float = 0.9
    n: int = 0                      # 0: use the case default
    ny: int = 0                     # 2D blocks in y (0: square / case default)
    unstructured: bool = False      # 2D: jittered Delaunay mesh instead of blocks
    mesh_file: str = ""
    final_time: float = -1.0        # <0: use the case default
    mesh_mode: str = "static"       # static | moving
    vertex_velocity: str = "average"  # average | linearized_riemann
    velocity_noise: float = 0.0     # amplitude factor on |v| for randomized runs

    flux: str = "rusanov"
    roe_alpha: float = 0.1

    limiter: str = "auto"           # auto | none | tvd_1d | tvb_2d
    tvb_m: float = 0.0
    nu: float = 1.5
    positivity: bool = True
    characteristic: bool = True

    smoothing: str = "auto"         # auto | none | laplacian | variable_diffusivity
    smooth_alpha: float = 0.5
    smooth_nsmooth: int = 4
    smooth_eps0: float = 0.05
    smooth_delta_l: float = 0.2
    smooth_delta_u: float = 0.8
    smooth_iterations: int = 10
    fallback_quality: float = 0.4

    h_min: float = 0.0              # 0: no lower-bound adaptation
    h_max: float = 0.0              # 0: no upper-bound adaptation
    swaps: str = "auto"             # auto | on | off
    quality_threshold: float = 0.3
    swap_hysteresis: float = 0.05

    output_dir: str = ""
    snapshot_interval: int = 0      # steps between snapshots; 0: final only
    seed: int = 0
    max_steps: int = 2_000_000

    def validate(self):
        if self.degree not in (1, 2, 3):
            raise ConfigError(f"degree must be 1, 2 or 3, got {self.degree}")
        if not 0 < self.cfl <= 1.0:
            raise ConfigError(f"cfl must be in (0, 1], got {self.cfl}")
        if self.mesh_mode not in ("static", "moving"):
            raise ConfigError(f"mesh_mode must be static|moving, got {self.mesh_mode!r}")
        if self.vertex_velocity not in ("average", "linearized_riemann"):
            raise ConfigError(f"bad vertex_velocity {self.vertex_velocity!r}")
        if self.limiter not in ("auto", "none", "tvd_1d", "tvb_2d"):
            raise ConfigError(f"bad limiter kind {self.limiter!r}")
        if self.smoothing not in ("auto", "none", "laplacian", "variable_diffusivity"):
            raise ConfigError(f"bad smoothing kind {self.smoothing!r}")
        if self.swaps not in ("auto", "on", "off"):
            raise ConfigError(f"swaps must be auto|on|off, got {self.swaps!r}")
        if self.h_min and self.h_max and self.h_min >= self.h_max:
            raise ConfigError(f"h_min {self.h_min} must be below h_max {self.h_max}")
        FluxSpec(self.flux, self.roe_alpha)   # validates
        return self

    def flux_spec(self) -> FluxSpec:
        return FluxSpec(self.flux, self.roe_alpha)

    def limiter_config(self, dim) -> LimiterConfig:
        kind = self.limiter
        if kind == "auto":
            kind = "tvd_1d" if dim == 1 else "tvb_2d"
        return LimiterConfig(kind=kind, M=self.tvb_m, nu=self.nu,
                             positivity=self.positivity,
                             characteristic=self.characteristic)

    def smoothing_config(self, dim) -> SmoothingConfig:
        kind = self.smoothing
        if kind == "auto":
            kind = "variable_diffusivity" if (dim == 2 and self.mesh_mode == "moving") else "none"
        return SmoothingConfig(kind=kind, alpha=self.smooth_alpha,
                               nsmooth=self.smooth_nsmooth, eps0=self.smooth_eps0,
                               delta_l=self.smooth_delta_l, delta_u=self.smooth_delta_u,
                               iterations=self.smooth_iterations,
                               fallback_quality=self.fallback_quality)

    def swaps_enabled(self, dim):
        if self.swaps == "auto":
            return dim == 2 and self.mesh_mode == "moving"
        return self.swaps == "on"


def config_field_names():
    return [f.name for f in fields(RunConfig)]

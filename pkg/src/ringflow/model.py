"""Domain types for multi-class non-local traffic models.

The model evolves M vehicle-class densities rho_i on one road segment.  Class
i moves with flux rho_i * f_i(s) * v_i(w), where v_i is a non-increasing
speed law evaluated on a downstream convolution w of the *total* density
sampled tau_i seconds in the past, and f_i is a non-increasing saturation
factor in [0, 1].  The saturation argument s is either the class's own
density (per-class coupling) or the total density (total-density coupling,
which keeps the class vector inside the simplex {rho_i >= 0, sum rho_i <= R}).

All laws are extended total functions: speeds vanish at and above their jam
density, saturations are 1 below zero density and 0 at and above the jam
density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    InvalidDensityRange,
    MixedMaxDensity,
    SimplexViolation,
    ValidationError,
)
from .profiles import Profile


def _as_float_array(r):
    arr = np.asarray(r, dtype=float)
    return arr, arr.ndim == 0


# --------------------------------------------------------------------------
# Speed laws
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Greenshields:
    """Linear speed law v(r) = v_max * (1 - r / r_max), clamped to 0 at jam."""

    v_max: float
    r_max: float

    def __post_init__(self):
        if self.v_max <= 0:
            raise ValueError("v_max must be positive")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")

    def evaluate(self, r):
        arr, scalar = _as_float_array(r)
        if np.any(arr < 0):
            raise ValueError("speed law evaluated at negative density")
        out = np.maximum(self.v_max * (1.0 - arr / self.r_max), 0.0)
        return float(out) if scalar else out

    def derivative_bound(self) -> float:
        """sup |v'| over the congested branch."""
        return self.v_max / self.r_max


@dataclass(frozen=True)
class Triangular:
    """Free-flow speed v_max up to rho_c, then linear decay to 0 at r_max."""

    v_max: float
    rho_c: float
    r_max: float

    def __post_init__(self):
        if self.v_max <= 0:
            raise ValueError("v_max must be positive")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")
        if not 0.0 <= self.rho_c < self.r_max:
            raise ValueError("rho_c must satisfy 0 <= rho_c < r_max")

    def evaluate(self, r):
        arr, scalar = _as_float_array(r)
        if np.any(arr < 0):
            raise ValueError("speed law evaluated at negative density")
        congested = self.v_max / (self.rho_c - self.r_max) * (arr - self.r_max)
        out = np.where(arr <= self.rho_c, self.v_max, np.maximum(congested, 0.0))
        return float(out) if scalar else out

    def derivative_bound(self) -> float:
        return self.v_max / (self.r_max - self.rho_c)


SpeedLaw = Greenshields | Triangular


# --------------------------------------------------------------------------
# Saturation laws
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NoSaturation:
    """f == 1 everywhere.  Without saturation the maximum principle is not
    guaranteed and class densities may exceed their nominal maximum."""

    def evaluate(self, rho):
        arr, scalar = _as_float_array(rho)
        out = np.ones_like(arr)
        return float(out) if scalar else out

    def derivative_bound(self) -> float:
        return 0.0


@dataclass(frozen=True)
class ExponentialSaturation:
    """f(rho) = 1 - exp(steepness * (rho - r_max)) on [0, r_max), clamped to 1
    below 0 and to 0 at and above r_max.

    Note f(0) = 1 - exp(-steepness * r_max), not exactly 1; for the steepness
    values of interest the gap is far below validation tolerances.
    """

    steepness: float
    r_max: float

    def __post_init__(self):
        if self.steepness <= 0:
            raise ValueError("steepness must be positive")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")
        if math.exp(-self.steepness * self.r_max) > 1e-9:
            raise ValueError("saturation too shallow: f(0) deviates from 1 beyond 1e-9")

    def evaluate(self, rho):
        arr, scalar = _as_float_array(rho)
        inner = 1.0 - np.exp(self.steepness * (np.minimum(arr, self.r_max) - self.r_max))
        out = np.where(arr >= self.r_max, 0.0, inner)
        out = np.where(arr < 0.0, 1.0, out)
        return float(out) if scalar else out

    def derivative_bound(self) -> float:
        return self.steepness


SaturationLaw = NoSaturation | ExponentialSaturation


# --------------------------------------------------------------------------
# Convolution kernels (look-ahead weights)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantKernel:
    """Uniform weight mass/length on [0, length]."""

    length: float
    mass: float = 1.0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("kernel length must be positive")
        if self.mass <= 0:
            raise ValueError("kernel mass must be positive")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= self.length), self.mass / self.length, 0.0)

    def integral(self, a, b):
        """Exact integral of the density over [a, b]."""
        a = np.clip(np.asarray(a, dtype=float), 0.0, self.length)
        b = np.clip(np.asarray(b, dtype=float), 0.0, self.length)
        return (b - a) * (self.mass / self.length)


@dataclass(frozen=True)
class LinearDecreasingKernel:
    """Weight (2*mass/length) * (1 - x/length) on [0, length]."""

    length: float
    mass: float = 1.0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("kernel length must be positive")
        if self.mass <= 0:
            raise ValueError("kernel mass must be positive")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= 0) & (x <= self.length)
        return np.where(inside, 2.0 * self.mass / self.length * (1.0 - x / self.length), 0.0)

    def integral(self, a, b):
        a = np.clip(np.asarray(a, dtype=float), 0.0, self.length)
        b = np.clip(np.asarray(b, dtype=float), 0.0, self.length)
        scale = 2.0 * self.mass / self.length

        def prim(x):
            return scale * (x - x * x / (2.0 * self.length))

        return prim(b) - prim(a)


KernelShape = ConstantKernel | LinearDecreasingKernel


# --------------------------------------------------------------------------
# Class / model specification
# --------------------------------------------------------------------------


class Coupling(Enum):
    PER_CLASS = "per-class"
    TOTAL_DENSITY = "total-density"


class Boundary(Enum):
    PERIODIC = "periodic"
    ZERO_EXTENSION = "zero-extension"


@dataclass(frozen=True)
class ClassSpec:
    """One vehicle class: maximal density, speed law, saturation, look-ahead
    kernel, and reaction delay."""

    name: str
    r_max: float
    speed: SpeedLaw
    saturation: SaturationLaw
    kernel: KernelShape
    tau: float = 0.0

    def __post_init__(self):
        if self.r_max <= 0:
            raise ValueError(f"class {self.name!r}: r_max must be positive")
        if self.tau < 0:
            raise ValueError(f"class {self.name!r}: delay tau must be non-negative")


@dataclass(frozen=True)
class ModelSpec:
    """M classes plus coupling mode, boundary mode, and space domain."""

    classes: tuple[ClassSpec, ...]
    coupling: Coupling
    boundary: Boundary
    x_min: float
    x_max: float

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if len(self.classes) < 1:
            raise ValueError("a model needs at least one class")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def max_densities(self) -> tuple[float, ...]:
        return tuple(c.r_max for c in self.classes)


@dataclass(frozen=True)
class InitialData:
    """Per-class initial profiles (one per class, in class order)."""

    profiles: tuple[Profile, ...]

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))

    def cell_averages(self, grid) -> np.ndarray:
        """Stack of per-class cell averages, shape (M, n_cells)."""
        edges = grid.edges
        return np.stack([p.cell_averages(edges) for p in self.profiles])


@dataclass(frozen=True)
class Scenario:
    """Full run configuration: model, initial data, horizon, and mesh."""

    name: str
    model: ModelSpec
    initial: InitialData
    T: float
    dx: float
    cfl_safety: float = 0.9
    dt: float | None = None  # force an explicit time step (checked against CFL)

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("time horizon T must be non-negative")
        if self.dx <= 0:
            raise ValueError("dx must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("forced dt must be positive")

    @property
    def delays(self) -> tuple[float, ...]:
        return tuple(c.tau for c in self.model.classes)


_BOUND_EPS = 1e-12


def validate_model(model: ModelSpec, initial: InitialData, grid) -> np.ndarray:
    """Check every model invariant and return the initial cell averages.

    Raises the matching typed error on the first violated constraint:
    MixedMaxDensity, InvalidDensityRange, SimplexViolation, or a generic
    ValidationError for inconsistent law parameters.
    """
    if len(initial.profiles) != model.n_classes:
        raise ValidationError(
            f"initial data has {len(initial.profiles)} profiles for {model.n_classes} classes"
        )

    if model.coupling is Coupling.TOTAL_DENSITY:
        r_set = set(model.max_densities)
        if len(r_set) > 1:
            raise MixedMaxDensity(
                f"total-density coupling needs equal max densities, got {sorted(r_set)}"
            )

    for cls in model.classes:
        if cls.speed.r_max != cls.r_max:
            raise ValidationError(
                f"class {cls.name!r}: speed law vanishes at {cls.speed.r_max}, "
                f"expected the class maximal density {cls.r_max}"
            )
        if isinstance(cls.saturation, ExponentialSaturation) and cls.saturation.r_max != cls.r_max:
            raise ValidationError(
                f"class {cls.name!r}: saturation law vanishes at {cls.saturation.r_max}, "
                f"expected the class maximal density {cls.r_max}"
            )

    rho0 = initial.cell_averages(grid)
    if not np.all(np.isfinite(rho0)):
        raise InvalidDensityRange("initial data contains non-finite cell averages")

    for cls, field_vals in zip(model.classes, rho0):
        eps = _BOUND_EPS * max(1.0, cls.r_max)
        if field_vals.min() < -eps or field_vals.max() > cls.r_max + eps:
            raise InvalidDensityRange(
                f"class {cls.name!r}: initial cell averages span "
                f"[{field_vals.min():.6g}, {field_vals.max():.6g}], outside [0, {cls.r_max}]"
            )

    if model.coupling is Coupling.TOTAL_DENSITY:
        r_common = model.classes[0].r_max
        total = rho0.sum(axis=0)
        if total.max() > r_common + _BOUND_EPS * max(1.0, r_common):
            raise SimplexViolation(
                f"total initial density reaches {total.max():.6g} > R = {r_common}"
            )

    # Negative dust from far tails of exact antiderivatives is below eps;
    # clip so the solver starts from an admissible state.
    return np.maximum(rho0, 0.0)

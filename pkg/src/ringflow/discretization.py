"""Space grid, cell-averaged kernel weights, CFL bound, and time planning.

The scheme is explicit, so the time step is limited by the monotonicity CFL
condition

    lambda = dt/dx <= 1 / max_i { V_i (1 + R ||f_i'||) + dx R omega_i^0 ||v_i'|| },

never weaker than the pure positivity bound 1 / max_i V_i.  Delays must be
integer multiples of dt; the planner searches dt = T/n for the smallest
admissible n that aligns every delay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CflViolation,
    DelayAlignmentFailure,
    NonCommensurateDomain,
    NonCommensurateSupport,
)
from .model import Coupling, KernelShape, ModelSpec

#: relative tolerance for "this ratio is an integer" checks
ALIGN_TOL = 1e-9

#: search cap: try at most 4x the CFL-optimal number of steps
ALIGN_SEARCH_FACTOR = 4


@dataclass(frozen=True)
class Grid:
    """Uniform cell grid on [x_min, x_max] with cell width dx."""

    x_min: float
    x_max: float
    dx: float
    n_cells: int

    @classmethod
    def build(cls, x_min: float, x_max: float, dx: float) -> "Grid":
        length = x_max - x_min
        if dx <= 0 or length <= 0:
            raise NonCommensurateDomain("domain length and dx must be positive")
        n = round(length / dx)
        if n < 1 or abs(n * dx - length) > 1e-12 * length:
            raise NonCommensurateDomain(
                f"domain length {length} is not an integer multiple of dx = {dx}"
            )
        return cls(x_min=x_min, x_max=x_max, dx=dx, n_cells=n)

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True, eq=False)
class DiscreteKernel:
    """Cell-averaged kernel weights omega^k, k = 0..N-1, with mass
    J = dx * sum_k omega^k."""

    weights: np.ndarray
    dx: float
    mass: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or len(w) < 1:
            raise ValueError("kernel weights must be a non-empty 1-d array")
        if w.min() < 0:
            raise ValueError("kernel weights must be non-negative")
        if np.any(np.diff(w) > 1e-12 * max(w[0], 1.0)):
            raise ValueError("kernel weights must be non-increasing")
        quad_mass = self.dx * w.sum()
        if abs(quad_mass - self.mass) > 1e-12 * max(1.0, self.mass):
            raise ValueError(
                f"kernel quadrature mass {quad_mass!r} differs from J = {self.mass!r}"
            )

    @property
    def support_cells(self) -> int:
        return len(self.weights)


def build_kernel_weights(shape: KernelShape, dx: float) -> DiscreteKernel:
    """Exact cell averages of the kernel density over cells [k*dx, (k+1)*dx].

    The support must be an integer number of cells (the convergence theory
    assumes L = N*dx exactly), otherwise NonCommensurateSupport is raised.
    """
    if dx <= 0:
        raise ValueError("dx must be positive")
    ratio = shape.length / dx
    n_support = round(ratio)
    if n_support < 1 or abs(ratio - n_support) > ALIGN_TOL * max(1.0, abs(ratio)):
        raise NonCommensurateSupport(
            f"kernel support {shape.length} is not an integer multiple of dx = {dx}"
        )
    edges = np.arange(n_support + 1) * dx
    weights = shape.integral(edges[:-1], edges[1:]) / dx
    return DiscreteKernel(weights=weights, dx=dx, mass=shape.mass)


def cfl_bound(model: ModelSpec, dx: float) -> float:
    """Monotonicity CFL bound on lambda = dt/dx for the given mesh.

    ||omega_i|| enters through the discrete peak weight omega_i^0.  The
    density scale R in the convolution term is the common maximal density
    when all classes share one; with heterogeneous per-class maxima the total
    density may reach sum_l R_l, so that conservative value is used instead.
    """
    r_all = model.max_densities
    if len(set(r_all)) == 1:
        r_conv = r_all[0]
    else:
        r_conv = sum(r_all)

    terms = []
    for cls in model.classes:
        w0 = float(build_kernel_weights(cls.kernel, dx).weights[0])
        terms.append(
            cls.speed.v_max * (1.0 + cls.r_max * cls.saturation.derivative_bound())
            + dx * r_conv * w0 * cls.speed.derivative_bound()
        )
    worst = max(terms)
    v_max = max(cls.speed.v_max for cls in model.classes)
    monotonicity = math.inf if worst == 0 else 1.0 / worst
    positivity = math.inf if v_max == 0 else 1.0 / v_max
    return min(monotonicity, positivity)


@dataclass(frozen=True)
class TimeGrid:
    """Planned time discretization: dt, step count, lambda, and per-class
    integer delay offsets h_i with tau_i = h_i * dt."""

    dt: float
    n_steps: int
    lam: float
    delay_steps: tuple[int, ...]

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


def _align_delays(delays, dt) -> tuple[int, ...] | None:
    steps = []
    for tau in delays:
        if tau == 0:
            steps.append(0)
            continue
        h = round(tau / dt)
        if h < 1 or abs(h * dt - tau) > ALIGN_TOL * max(tau, dt):
            return None
        steps.append(h)
    return tuple(steps)


def plan_time_grid(
    T: float,
    dx: float,
    bound: float,
    safety: float,
    delays: tuple[float, ...] = (),
    dt: float | None = None,
) -> TimeGrid:
    """Choose dt <= safety * bound * dx with T/dt integer and every nonzero
    delay an integer multiple of dt.

    With ``dt`` given, that step is validated instead of searched for: lambda
    above the hard CFL bound raises CflViolation, misaligned T or delays
    raise DelayAlignmentFailure.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if not 0 < safety <= 1:
        raise ValueError("safety must lie in (0, 1]")
    if any(tau < 0 for tau in delays):
        raise ValueError("delays must be non-negative")
    if bound <= 0:
        raise ValueError("CFL bound must be positive")

    dt_max = safety * bound * dx

    if T == 0:
        step = dt if dt is not None else min(dt_max, 1.0)
        return TimeGrid(dt=step, n_steps=0, lam=step / dx, delay_steps=tuple(0 for _ in delays))

    if dt is not None:
        lam = dt / dx
        if lam > bound * (1.0 + 1e-12):
            raise CflViolation(
                f"forced dt = {dt} gives lambda = {lam:.6g} above the CFL bound {bound:.6g}"
            )
        n = round(T / dt)
        if n < 1 or abs(n * dt - T) > ALIGN_TOL * max(T, dt):
            raise DelayAlignmentFailure(f"horizon T = {T} is not an integer multiple of dt = {dt}")
        steps = _align_delays(delays, dt)
        if steps is None:
            raise DelayAlignmentFailure(
                f"forced dt = {dt} does not align the delays {tuple(delays)}"
            )
        return TimeGrid(dt=dt, n_steps=n, lam=lam, delay_steps=steps)

    n_start = max(1, math.ceil(T / dt_max)) if math.isfinite(dt_max) else 1
    for n in range(n_start, ALIGN_SEARCH_FACTOR * n_start + 1):
        cand = T / n
        if cand > dt_max:
            continue
        steps = _align_delays(delays, cand)
        if steps is not None:
            return TimeGrid(dt=cand, n_steps=n, lam=cand / dx, delay_steps=steps)
    raise DelayAlignmentFailure(
        f"no dt in [{T / (ALIGN_SEARCH_FACTOR * n_start):.6g}, {dt_max:.6g}] aligns "
        f"delays {tuple(delays)} with T = {T}"
    )

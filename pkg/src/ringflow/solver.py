"""Time marching for the delayed non-local multi-class scheme.

One update of class i reads

    rho_i^{n+1}[j] = rho_i^n[j]
        - lam * ( rho_i^n[j]   * f_i(s^n[j+1]) * V_i[j+1]
                - rho_i^n[j-1] * f_i(s^n[j])   * V_i[j] )

with V_i[j] = v_i( dx * sum_k omega_i^k * r^{n-h_i}[j+k] ) built from the
total density h_i steps in the past, and s = rho_i (per-class coupling) or
s = r (total-density coupling).  Periodic runs wrap both the convolution
window and the stencil; zero-extension runs see vacuum ghost cells.

The history of total-density fields is kept in a ring of depth max_i h_i + 1,
prefilled with r^0 (constant backward extension of the initial data).
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass

import numpy as np

from . import diagnostics as _diag
from .discretization import (
    DiscreteKernel,
    Grid,
    TimeGrid,
    build_kernel_weights,
    cfl_bound,
    plan_time_grid,
)
from .errors import BoundViolation, KernelWiderThanDomain, OutputTimeOutOfRange
from .model import (
    Boundary,
    Coupling,
    ModelSpec,
    NoSaturation,
    Scenario,
    validate_model,
)

#: admissibility slack before a step is declared broken
BOUND_TOL = 1e-10


@dataclass
class SimState:
    """Per-class cell averages at one time level; rho has shape (M, n_cells)."""

    t: float
    rho: np.ndarray


class HistoryRing:
    """Ring of past total-density fields.

    Slot ``lag`` holds the total density exactly ``lag`` accepted steps in
    the past; at t = 0 every slot carries r^0.
    """

    def __init__(self, depth: int, r0: np.ndarray):
        if depth < 1:
            raise ValueError("history depth must be at least 1")
        self.depth = depth
        self._buf = np.tile(np.asarray(r0, dtype=float), (depth, 1))
        self._head = 0

    def push(self, r: np.ndarray) -> None:
        self._head = (self._head + 1) % self.depth
        self._buf[self._head] = r

    def get(self, lag: int) -> np.ndarray:
        if not 0 <= lag < self.depth:
            raise IndexError(f"history lag {lag} outside ring of depth {self.depth}")
        return self._buf[(self._head - lag) % self.depth]


@dataclass
class StepRecord:
    """One accepted transition n -> n+1 with the velocity fields it used."""

    step: int
    t: float
    rho_before: np.ndarray
    rho_after: np.ndarray
    velocities: np.ndarray
    lam: float


@dataclass
class PreparedRun:
    """Scenario with grid, kernels, CFL bound, time grid, and validated
    initial cell averages resolved."""

    scenario: Scenario
    grid: Grid
    kernels: tuple[DiscreteKernel, ...]
    bound: float
    time_grid: TimeGrid
    rho0: np.ndarray


def prepare(scenario: Scenario) -> PreparedRun:
    model = scenario.model
    grid = Grid.build(model.x_min, model.x_max, scenario.dx)
    rho0 = validate_model(model, scenario.initial, grid)
    kernels = tuple(build_kernel_weights(c.kernel, scenario.dx) for c in model.classes)
    if model.boundary is Boundary.PERIODIC:
        for cls, k in zip(model.classes, kernels):
            if k.support_cells > grid.n_cells:
                raise KernelWiderThanDomain(
                    f"class {cls.name!r}: kernel spans {k.support_cells} cells, "
                    f"domain has {grid.n_cells}"
                )
    bound = cfl_bound(model, scenario.dx)
    time_grid = plan_time_grid(
        scenario.T,
        scenario.dx,
        bound,
        scenario.cfl_safety,
        delays=scenario.delays,
        dt=scenario.dt,
    )
    return PreparedRun(
        scenario=scenario,
        grid=grid,
        kernels=kernels,
        bound=bound,
        time_grid=time_grid,
        rho0=rho0,
    )


def _shift_left(a: np.ndarray, boundary: Boundary, ghost: float) -> np.ndarray:
    """a[j+1], wrapping or padding with ``ghost`` on the right."""
    if boundary is Boundary.PERIODIC:
        return np.roll(a, -1)
    out = np.empty_like(a)
    out[:-1] = a[1:]
    out[-1] = ghost
    return out


def _shift_right(a: np.ndarray, boundary: Boundary, ghost: float) -> np.ndarray:
    """a[j-1], wrapping or padding with ``ghost`` on the left."""
    if boundary is Boundary.PERIODIC:
        return np.roll(a, 1)
    out = np.empty_like(a)
    out[1:] = a[:-1]
    out[0] = ghost
    return out


def convolved_velocity(
    r_delayed: np.ndarray,
    kernel: DiscreteKernel,
    speed,
    boundary: Boundary,
) -> np.ndarray:
    """v( dx * sum_k omega^k * r[j+k] ) for every cell j."""
    n = len(r_delayed)
    n_sup = kernel.support_cells
    if boundary is Boundary.PERIODIC:
        if n_sup > n:
            raise KernelWiderThanDomain(
                f"kernel spans {n_sup} cells, periodic domain has {n}"
            )
        ext = np.concatenate([r_delayed, r_delayed[: n_sup - 1]])
    else:
        ext = np.concatenate([r_delayed, np.zeros(n_sup - 1)])
    window = np.correlate(ext, kernel.weights, mode="valid") * kernel.dx
    return speed.evaluate(window)


def hw_step(state: SimState, history: HistoryRing, prep: PreparedRun):
    """Advance one step; returns (new state, velocity fields used, clamp count).

    The history ring is advanced by pushing the new total density.  A value
    outside the admissible interval by more than BOUND_TOL raises
    BoundViolation; tiny negatives inside the tolerance are clamped to zero
    and counted.
    """
    model = prep.scenario.model
    tg = prep.time_grid
    lam = tg.lam
    boundary = model.boundary
    rho = state.rho
    total_coupled = model.coupling is Coupling.TOTAL_DENSITY

    r_now = history.get(0)
    s_next_total = _shift_left(r_now, boundary, 0.0) if total_coupled else None

    new = np.empty_like(rho)
    vels = np.empty_like(rho)
    for i, cls in enumerate(model.classes):
        r_delayed = history.get(tg.delay_steps[i])
        v_here = convolved_velocity(r_delayed, prep.kernels[i], cls.speed, boundary)
        vels[i] = v_here
        v_next = _shift_left(v_here, boundary, cls.speed.evaluate(0.0))
        if total_coupled:
            s_here, s_next = r_now, s_next_total
        else:
            s_here = rho[i]
            s_next = _shift_left(s_here, boundary, 0.0)
        f_next = cls.saturation.evaluate(s_next)
        flux = rho[i] * f_next * v_next
        flux_in = _shift_right(flux, boundary, 0.0)
        new[i] = rho[i] - lam * (flux - flux_in)

    if new.min() < -BOUND_TOL:
        raise BoundViolation(
            f"negative density {new.min():.3e} at t = {state.t:.6g}; check the CFL setup"
        )
    negative = new < 0.0
    clamp_count = int(np.count_nonzero(negative))
    if clamp_count:
        new[negative] = 0.0

    if total_coupled:
        if all(not isinstance(c.saturation, NoSaturation) for c in model.classes):
            r_cap = model.classes[0].r_max
            total_new = new.sum(axis=0)
            if total_new.max() > r_cap + BOUND_TOL:
                raise BoundViolation(
                    f"total density {total_new.max():.6g} left the simplex at "
                    f"t = {state.t:.6g}"
                )
    else:
        for i, cls in enumerate(model.classes):
            # Without saturation the maximum principle does not apply and the
            # class density may legitimately exceed r_max.
            if isinstance(cls.saturation, NoSaturation):
                continue
            if new[i].max() > cls.r_max + BOUND_TOL:
                raise BoundViolation(
                    f"class {cls.name!r} density {new[i].max():.6g} exceeded "
                    f"r_max = {cls.r_max} at t = {state.t:.6g}"
                )

    history.push(new.sum(axis=0))
    return SimState(t=state.t + tg.dt, rho=new), vels, clamp_count


@dataclass
class DiagnosticsSeries:
    """Per-step diagnostics sampled at ``stride`` (struct-of-arrays)."""

    steps: np.ndarray
    t: np.ndarray
    l1: np.ndarray
    linf: np.ndarray
    tv_r: np.ndarray
    r_max: np.ndarray
    clamp_count: np.ndarray
    stride: int
    entropy_max_residual: np.ndarray | None = None


@dataclass
class StepDiagnostics:
    """One diagnostics row."""

    t: float
    l1: tuple[float, ...]
    linf: tuple[float, ...]
    tv_total: float
    clamp_count: int


def diagnostics_row(series: DiagnosticsSeries, k: int) -> StepDiagnostics:
    return StepDiagnostics(
        t=float(series.t[k]),
        l1=tuple(series.l1[k]),
        linf=tuple(series.linf[k]),
        tv_total=float(series.tv_r[k]),
        clamp_count=int(series.clamp_count[k]),
    )


@dataclass
class Trajectory:
    """Recorded output of one run."""

    scenario: Scenario
    grid: Grid
    time_grid: TimeGrid
    bound: float
    snapshots: list[SimState]
    diagnostics: DiagnosticsSeries | None
    records: list[StepRecord]
    clamp_total: int
    wall_time: float

    @property
    def snapshot_times(self) -> tuple[float, ...]:
        return tuple(s.t for s in self.snapshots)

    def final_state(self) -> SimState:
        if not self.snapshots:
            raise ValueError("trajectory recorded no snapshots")
        return self.snapshots[-1]

    @property
    def metadata(self) -> dict:
        tg = self.time_grid
        return {
            "dt": tg.dt,
            "n_steps": tg.n_steps,
            "lambda": tg.lam,
            "delay_steps": list(tg.delay_steps),
            "cfl_bound": self.bound,
            "n_cells": self.grid.n_cells,
            "dx": self.grid.dx,
            "clamp_total": self.clamp_total,
            "wall_time_s": self.wall_time,
        }


def _resolve_snapshot_steps(times, time_grid: TimeGrid) -> dict[int, float]:
    dt, n_steps = time_grid.dt, time_grid.n_steps
    T = n_steps * dt
    resolved: dict[int, float] = {}
    for t_req in times:
        slack = 0.5 * dt if n_steps > 0 else 0.0
        if t_req < -slack or t_req > T + slack:
            raise OutputTimeOutOfRange(f"snapshot time {t_req} outside [0, {T}]")
        idx = min(n_steps, max(0, round(t_req / dt))) if n_steps > 0 else 0
        resolved.setdefault(idx, t_req)
    return resolved


def run(
    scenario: Scenario,
    observers=(),
    observer_stride: int = 1,
    snapshot_times=None,
    record_steps=(),
    diag_stride: int = 1,
) -> Trajectory:
    """March the scheme for n_steps and collect snapshots and diagnostics.

    ``snapshot_times`` resolve to the nearest step (realized times are
    recorded); default is {0, T}.  ``record_steps`` are step indices n whose
    transition n -> n+1 is kept in full (states plus velocity fields) for
    entropy checking.  ``diag_stride`` = 0 disables the diagnostics series.
    Observers are called as observer(step_index, state) every
    ``observer_stride`` accepted steps.
    """
    t_begin = _time.perf_counter()
    prep = prepare(scenario)
    tg = prep.time_grid
    model = scenario.model
    dx = prep.grid.dx
    boundary = model.boundary

    if snapshot_times is None:
        snapshot_times = (0.0, tg.n_steps * tg.dt)
    snap_at = _resolve_snapshot_steps(snapshot_times, tg)
    record_set = frozenset(int(n) for n in record_steps)
    if record_set and (min(record_set) < 0 or max(record_set) >= tg.n_steps):
        raise OutputTimeOutOfRange("record_steps must lie in [0, n_steps)")

    collect_diag = diag_stride and diag_stride > 0
    if collect_diag:
        diag_steps = list(range(0, tg.n_steps + 1, diag_stride))
        if diag_steps[-1] != tg.n_steps:
            diag_steps.append(tg.n_steps)
        diag_index = {n: k for k, n in enumerate(diag_steps)}
        n_rows = len(diag_steps)
        M = model.n_classes
        d_t = np.empty(n_rows)
        d_l1 = np.empty((n_rows, M))
        d_linf = np.empty((n_rows, M))
        d_tv = np.empty(n_rows)
        d_rmax = np.empty(n_rows)
        d_clamp = np.zeros(n_rows, dtype=int)

    history = HistoryRing(max(tg.delay_steps, default=0) + 1, prep.rho0.sum(axis=0))
    state = SimState(t=0.0, rho=prep.rho0.copy())

    snapshots: list[SimState] = []
    records: list[StepRecord] = []
    clamp_total = 0
    step_clamps = 0

    for n in range(tg.n_steps + 1):
        state.t = n * tg.dt
        if n in snap_at:
            snapshots.append(SimState(t=state.t, rho=state.rho.copy()))
        if collect_diag and n in diag_index:
            k = diag_index[n]
            r_total = state.rho.sum(axis=0)
            d_t[k] = state.t
            d_l1[k] = dx * np.abs(state.rho).sum(axis=1)
            d_linf[k] = np.abs(state.rho).max(axis=1)
            d_tv[k] = _diag.total_variation(r_total, boundary)
            d_rmax[k] = r_total.max()
            d_clamp[k] = step_clamps
        if n == tg.n_steps:
            break

        recording = n in record_set
        rho_before = state.rho.copy() if recording else None
        state, vels, step_clamps = hw_step(state, history, prep)
        clamp_total += step_clamps
        if recording:
            records.append(
                StepRecord(
                    step=n,
                    t=n * tg.dt,
                    rho_before=rho_before,
                    rho_after=state.rho.copy(),
                    velocities=vels,
                    lam=tg.lam,
                )
            )
        if observers and (n + 1) % observer_stride == 0:
            for obs in observers:
                obs(n + 1, state)

    diag = None
    if collect_diag:
        diag = DiagnosticsSeries(
            steps=np.asarray(diag_steps, dtype=int),
            t=d_t,
            l1=d_l1,
            linf=d_linf,
            tv_r=d_tv,
            r_max=d_rmax,
            clamp_count=d_clamp,
            stride=diag_stride,
        )

    return Trajectory(
        scenario=scenario,
        grid=prep.grid,
        time_grid=tg,
        bound=prep.bound,
        snapshots=snapshots,
        diagnostics=diag,
        records=records,
        clamp_total=clamp_total,
        wall_time=_time.perf_counter() - t_begin,
    )

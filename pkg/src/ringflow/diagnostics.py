"""Measured quantities: norms, total variation, entropy residuals, the
oscillation functional, and inter-trajectory distances.

The scheme provably conserves the per-class discrete L1 norm, keeps cell
values inside their admissible intervals, and satisfies a discrete entropy
inequality for every constant kappa; the functions here measure those
quantities so that runs can be checked against the theory at runtime.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CouplingUnsupported, GridMismatch, MissingTvSeries
from .model import Boundary, Coupling, ModelSpec

#: absolute part of the entropy-residual tolerance
ENTROPY_TOL = 1e-10

#: fixed entropy constants; random ones in [0, max R_i] are appended per run
KAPPA_FIXED = (-0.1, 0.0, 0.25, 0.5, 0.75, 1.0, 1.1)

DEFAULT_KAPPA_SEED = 12345


def l1_norm(field: np.ndarray, dx: float) -> float:
    """Discrete L1 norm dx * sum_j |field_j|."""
    return float(dx * np.abs(field).sum())


def total_variation(field: np.ndarray, boundary: Boundary) -> float:
    """sum_j |field_{j+1} - field_j|, with the wrap-around jump on periodic
    domains.  Zero-extension runs report interior variation only."""
    field = np.asarray(field, dtype=float)
    tv = float(np.abs(np.diff(field)).sum())
    if boundary is Boundary.PERIODIC and len(field) > 1:
        tv += abs(float(field[0]) - float(field[-1]))
    return tv


def boundary_jumps(field: np.ndarray) -> float:
    """|field| at the two domain ends; the part total_variation leaves out on
    zero-extension domains when the data reaches the boundary."""
    field = np.asarray(field, dtype=float)
    return abs(float(field[0])) + abs(float(field[-1]))


@dataclass(frozen=True)
class EntropyReport:
    """Worst entropy residual over all classes and cells for one kappa."""

    kappa: float
    max_residual: float
    violation_cells: int

    @property
    def tolerance(self) -> float:
        return ENTROPY_TOL * (1.0 + abs(self.kappa))

    @property
    def ok(self) -> bool:
        return self.violation_cells == 0


def _shift_left(a, boundary, ghost):
    if boundary is Boundary.PERIODIC:
        return np.roll(a, -1)
    out = np.empty_like(a)
    out[:-1] = a[1:]
    out[-1] = ghost
    return out


def _shift_right(a, boundary, ghost):
    if boundary is Boundary.PERIODIC:
        return np.roll(a, 1)
    out = np.empty_like(a)
    out[1:] = a[:-1]
    out[0] = ghost
    return out


def entropy_residual(record, model: ModelSpec, kappa: float) -> EntropyReport:
    """Left-hand side of the discrete entropy inequality on one recorded step.

    For each class the numerical entropy flux is assembled from the scheme
    flux G(u, w) = u * f(w) * V_downwind as

        F^k(u, w) = G(max(u, k), max(w, k)) - G(min(u, k), min(w, k))

    and the residual

        |u_new - k| - |u - k| + lam * (F^k_{j+1/2} - F^k_{j-1/2})
            + lam * sgn(u_new - k) * k * f(k) * (V_{j+1} - V_j)

    is non-positive (up to roundoff) whenever the CFL condition holds.  Only
    per-class coupling carries this guarantee.
    """
    if model.coupling is not Coupling.PER_CLASS:
        raise CouplingUnsupported(
            "the discrete entropy inequality is stated for per-class coupling only"
        )
    boundary = model.boundary
    lam = record.lam
    worst = -np.inf
    violations = 0
    tol = ENTROPY_TOL * (1.0 + abs(kappa))

    for i, cls in enumerate(model.classes):
        f = cls.saturation
        u = record.rho_before[i]
        u_new = record.rho_after[i]
        u_up = _shift_right(u, boundary, 0.0)  # u_{j-1}
        u_dn = _shift_left(u, boundary, 0.0)  # u_{j+1}
        v_here = record.velocities[i]
        v_dn = _shift_left(v_here, boundary, cls.speed.evaluate(0.0))

        k_arr = np.full_like(u, kappa)
        f_kappa = float(f.evaluate(kappa))

        def flux_pair(a, b, v):
            hi = np.maximum(a, k_arr) * f.evaluate(np.maximum(b, k_arr)) * v
            lo = np.minimum(a, k_arr) * f.evaluate(np.minimum(b, k_arr)) * v
            return hi - lo

        f_plus = flux_pair(u, u_dn, v_dn)  # interface j+1/2 uses V_{j+1}
        f_minus = flux_pair(u_up, u, v_here)  # interface j-1/2 uses V_j
        residual = (
            np.abs(u_new - kappa)
            - np.abs(u - kappa)
            + lam * (f_plus - f_minus)
            + lam * np.sign(u_new - kappa) * kappa * f_kappa * (v_dn - v_here)
        )
        worst = max(worst, float(residual.max()))
        violations += int(np.count_nonzero(residual > tol))

    return EntropyReport(kappa=kappa, max_residual=worst, violation_cells=violations)


def entropy_kappa_set(
    model: ModelSpec, seed: int = DEFAULT_KAPPA_SEED, n_random: int = 10
) -> tuple[float, ...]:
    """Fixed kappa grid plus seeded uniform draws over [0, max R_i]."""
    rng = np.random.default_rng(seed)
    r_top = max(model.max_densities)
    random_part = rng.uniform(0.0, r_top, size=n_random)
    return KAPPA_FIXED + tuple(float(k) for k in random_part)


def entropy_sweep(trajectory, kappas=None, seed: int = DEFAULT_KAPPA_SEED):
    """Entropy reports for every recorded step and every kappa."""
    model = trajectory.scenario.model
    if kappas is None:
        kappas = entropy_kappa_set(model, seed=seed)
    return [
        (rec.step, entropy_residual(rec, model, kappa))
        for rec in trajectory.records
        for kappa in kappas
    ]


def j_functional(trajectory) -> float:
    """Time integral of the spatial total variation of the total density,
    evaluated by the left-endpoint rule dt * sum_{n < n_steps} TV(r^n)."""
    diag = trajectory.diagnostics
    if diag is None:
        raise MissingTvSeries("run the scenario with diagnostics enabled")
    n_steps = trajectory.time_grid.n_steps
    dt = trajectory.time_grid.dt
    mask = diag.steps < n_steps
    if diag.stride > 1:
        warnings.warn(
            f"TV series sampled at stride {diag.stride}; J is approximate",
            stacklevel=2,
        )
    return float(diag.stride * dt * diag.tv_r[mask].sum())


def _same_grid(a, b) -> bool:
    ga, gb = a.grid, b.grid
    return (
        ga.n_cells == gb.n_cells
        and ga.dx == gb.dx
        and ga.x_min == gb.x_min
        and ga.x_max == gb.x_max
    )


def _nearest_snapshot(trajectory, t: float):
    if not trajectory.snapshots:
        raise GridMismatch("trajectory recorded no snapshots")
    times = np.asarray(trajectory.snapshot_times)
    return trajectory.snapshots[int(np.argmin(np.abs(times - t)))]


def l1_distance(traj_a, traj_b, t: float) -> float:
    """sum_i dx * sum_j |rho^a_{i,j} - rho^b_{i,j}| at the snapshots nearest t."""
    if not _same_grid(traj_a, traj_b):
        raise GridMismatch("trajectories live on different grids")
    snap_a = _nearest_snapshot(traj_a, t)
    snap_b = _nearest_snapshot(traj_b, t)
    if snap_a.rho.shape != snap_b.rho.shape:
        raise GridMismatch("trajectories carry different class counts")
    return float(traj_a.grid.dx * np.abs(snap_a.rho - snap_b.rho).sum())


def total_density_distance(traj_a, traj_b, t: float) -> float:
    """dx * sum_j |r^a_j - r^b_j| at the snapshots nearest t.

    Smaller than l1_distance whenever mass merely reshuffles between classes;
    this is the discrepancy visible in total-density profiles.
    """
    if not _same_grid(traj_a, traj_b):
        raise GridMismatch("trajectories live on different grids")
    snap_a = _nearest_snapshot(traj_a, t)
    snap_b = _nearest_snapshot(traj_b, t)
    r_a = snap_a.rho.sum(axis=0)
    r_b = snap_b.rho.sum(axis=0)
    return float(traj_a.grid.dx * np.abs(r_a - r_b).sum())


def empirical_time_lipschitz(trajectory) -> np.ndarray:
    """Largest per-class ratio ||rho_i(t2)-rho_i(t1)||_1 / (t2-t1) over
    consecutive snapshots; reported, not compared to analytic constants."""
    snaps = trajectory.snapshots
    if len(snaps) < 2:
        raise ValueError("need at least two snapshots")
    dx = trajectory.grid.dx
    worst = np.zeros(snaps[0].rho.shape[0])
    for a, b in zip(snaps[:-1], snaps[1:]):
        gap = b.t - a.t
        if gap <= 0:
            continue
        worst = np.maximum(worst, dx * np.abs(b.rho - a.rho).sum(axis=1) / gap)
    return worst

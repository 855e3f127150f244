"""Multi-run studies: delay sweeps, penetration sweeps, grid refinement, and
perturbation-stability experiments.

Comparable runs inside one sweep share a single time step: the planner is
handed the union of every delay appearing in the sweep, so scalar outputs of
rows that should coincide (for example the pure-autonomous rows of a
penetration sweep across different human delays) match to rounding rather
than to discretization error.
"""

from __future__ import annotations

import dataclasses
import math
import time as _time

import numpy as np

from .diagnostics import j_functional, l1_distance, total_density_distance
from .discretization import cfl_bound, plan_time_grid
from .errors import NonNestedGrids, PenetrationOutOfRange, ValidationError
from .model import Scenario
from .scenarios import preset_av_penetration, preset_delay_convergence
from .solver import run

#: snapshot count used when a study needs a time series of states
SERIES_SNAPSHOTS = 61


@dataclasses.dataclass
class SweepResult:
    """Ordered rows of per-run scalars plus sweep-level metadata."""

    kind: str
    parameters: tuple[str, ...]
    rows: list[dict]
    metadata: dict

    def column(self, key: str) -> np.ndarray:
        return np.asarray([row[key] for row in self.rows])


def _common_dt(sample: Scenario, all_delays, T: float) -> float:
    """One dt aligning every delay that occurs anywhere in the sweep."""
    bound = cfl_bound(sample.model, sample.dx)
    plan = plan_time_grid(
        T, sample.dx, bound, sample.cfl_safety, delays=tuple(all_delays)
    )
    return plan.dt


def _maybe_bundle(trajectory, bundle_dir, leaf: str) -> None:
    if bundle_dir is None:
        return
    from pathlib import Path

    from .bundles import write_bundle

    write_bundle(trajectory, Path(bundle_dir) / leaf)


def delay_sweep(
    taus,
    dx: float = 5e-3,
    T: float = 30.0,
    cfl_safety: float = 0.9,
    diag_stride: int = 1,
    bundle_dir=None,
) -> SweepResult:
    """Run the delay-convergence preset for every tau and measure the L1
    distance of each run to the tau = 0 reference at the final time.

    ``bundle_dir`` writes each run's full bundle under that directory.
    """
    taus = [float(t) for t in taus]
    if not taus:
        raise ValidationError("delay sweep needs at least one tau")
    if not any(t == 0.0 for t in taus):
        raise ValidationError("delay sweep needs the tau = 0 reference run")

    sample = preset_delay_convergence(taus[0], dx=dx, T=T, cfl_safety=cfl_safety)
    dt = _common_dt(sample, set(taus), T)

    trajs = []
    rows = []
    for k, tau in enumerate(taus):
        sc = preset_delay_convergence(tau, dx=dx, T=T, cfl_safety=cfl_safety)
        sc = dataclasses.replace(sc, dt=dt)
        t0 = _time.perf_counter()
        traj = run(sc, diag_stride=diag_stride)
        trajs.append(traj)
        _maybe_bundle(traj, bundle_dir, f"{k:03d}-tau{tau:g}")
        rows.append(
            {
                "tau1": tau,
                "dt": traj.time_grid.dt,
                "h1": traj.time_grid.delay_steps[0],
                "tv_final": float(traj.diagnostics.tv_r[-1]),
                "j_functional": j_functional(traj),
                "runtime_s": _time.perf_counter() - t0,
            }
        )

    reference = trajs[taus.index(0.0)]
    for row, traj in zip(rows, trajs):
        row["l1_distance_to_ref"] = l1_distance(traj, reference, T)
        row["r_distance_to_ref"] = total_density_distance(traj, reference, T)

    return SweepResult(
        kind="delay",
        parameters=("tau1",),
        rows=rows,
        metadata={"dx": dx, "T": T, "dt": dt, "reference_tau": 0.0},
    )


def penetration_sweep(
    ps,
    speed_family: str = "triangular",
    tau_h_list=(2.5,),
    dx: float = 5e-3,
    T: float = 30.0,
    cfl_safety: float = 0.9,
    bundle_dir=None,
) -> SweepResult:
    """Grid of runs over penetration rate and human delay, reporting the
    oscillation functional J of each run."""
    ps = [float(p) for p in ps]
    tau_h_list = [float(t) for t in tau_h_list]
    if any(not 0.0 <= p <= 1.0 for p in ps):
        raise PenetrationOutOfRange(f"penetration rates {ps} must lie in [0, 1]")
    if not ps or not tau_h_list:
        raise ValidationError("penetration sweep needs non-empty p and tau_h grids")

    sample = preset_av_penetration(
        ps[0], speed_family=speed_family, tau_h=tau_h_list[0], dx=dx, T=T,
        cfl_safety=cfl_safety,
    )
    dt = _common_dt(sample, set(tau_h_list) | {0.0}, T)

    rows = []
    for tau_h in tau_h_list:
        for p in ps:
            sc = preset_av_penetration(
                p, speed_family=speed_family, tau_h=tau_h, dx=dx, T=T,
                cfl_safety=cfl_safety,
            )
            sc = dataclasses.replace(sc, dt=dt)
            t0 = _time.perf_counter()
            traj = run(sc, diag_stride=1)
            _maybe_bundle(traj, bundle_dir, f"tauh{tau_h:g}-p{p:g}")
            rows.append(
                {
                    "p": p,
                    "tau_h": tau_h,
                    "speed_family": speed_family,
                    "dt": traj.time_grid.dt,
                    "h_h": traj.time_grid.delay_steps[0],
                    "j_functional": j_functional(traj),
                    "tv_final": float(traj.diagnostics.tv_r[-1]),
                    "sup_r": float(traj.diagnostics.r_max.max()),
                    "runtime_s": _time.perf_counter() - t0,
                }
            )

    return SweepResult(
        kind="penetration",
        parameters=("p", "tau_h"),
        rows=rows,
        metadata={"dx": dx, "T": T, "dt": dt, "speed_family": speed_family},
    )


def _restrict_pairwise(fine: np.ndarray) -> np.ndarray:
    """Average cell pairs of a (M, 2n) field down to (M, n); conserves the
    discrete integral exactly."""
    return 0.5 * (fine[:, 0::2] + fine[:, 1::2])


def refinement_study(scenario: Scenario, dx_list) -> SweepResult:
    """Self-convergence under grid halving.

    e_k = L1 distance at time T between the run on dx_k and the pairwise
    restriction of the run on dx_{k+1}; the observed order is
    EOC_k = log2(e_k / e_{k+1}).
    """
    dx_list = [float(d) for d in dx_list]
    if len(dx_list) < 2:
        raise NonNestedGrids("need at least two grids")
    for coarse, fine in zip(dx_list[:-1], dx_list[1:]):
        if not fine < coarse:
            raise NonNestedGrids(f"dx list must strictly decrease, got {coarse} -> {fine}")
        if abs(coarse / fine - 2.0) > 1e-12:
            raise NonNestedGrids(f"refinement ratio {coarse / fine} is not 2")

    finals = []
    rows = []
    for dx_k in dx_list:
        sc = dataclasses.replace(scenario, dx=dx_k, dt=None)
        t0 = _time.perf_counter()
        traj = run(sc, diag_stride=0, snapshot_times=(scenario.T,))
        finals.append(traj.final_state().rho)
        rows.append(
            {
                "dx": dx_k,
                "n_cells": traj.grid.n_cells,
                "dt": traj.time_grid.dt,
                "runtime_s": _time.perf_counter() - t0,
            }
        )

    errors = []
    for k in range(len(dx_list) - 1):
        restricted = _restrict_pairwise(finals[k + 1])
        errors.append(float(dx_list[k] * np.abs(finals[k] - restricted).sum()))
    eocs = []
    for e_coarse, e_fine in zip(errors[:-1], errors[1:]):
        if e_coarse == 0.0 or e_fine == 0.0:
            eocs.append(math.nan)
        else:
            eocs.append(math.log2(e_coarse / e_fine))

    for k, row in enumerate(rows):
        row["error_to_next"] = errors[k] if k < len(errors) else math.nan
        row["eoc"] = eocs[k - 1] if 1 <= k <= len(eocs) else math.nan

    return SweepResult(
        kind="refine",
        parameters=("dx",),
        rows=rows,
        metadata={"errors": errors, "eocs": eocs, "T": scenario.T},
    )


def stability_experiment(
    scenario: Scenario,
    perturbation_size: float = 0.0,
    delays_b=None,
    n_snapshots: int = SERIES_SNAPSHOTS,
    bundle_dir=None,
) -> SweepResult:
    """Run the scenario and a perturbed twin, tracking their L1 distance.

    The twin adds a uniform bump of the given size to the first class's
    initial profile and/or overrides the per-class delays.  Both runs share
    one dt and snapshot grid; rows report distance over time and the
    amplification relative to the initial L1 gap.
    """
    from .model import InitialData
    from .profiles import Constant, Summed

    if perturbation_size < 0:
        raise ValidationError("perturbation size must be non-negative")

    model_b = scenario.model
    if delays_b is not None:
        delays_b = tuple(float(t) for t in delays_b)
        if len(delays_b) != scenario.model.n_classes:
            raise ValidationError("delays_b must list one delay per class")
        classes_b = tuple(
            dataclasses.replace(c, tau=tau) for c, tau in zip(scenario.model.classes, delays_b)
        )
        model_b = dataclasses.replace(scenario.model, classes=classes_b)

    initial_b = scenario.initial
    if perturbation_size > 0.0:
        bumped = Summed(terms=(scenario.initial.profiles[0], Constant(perturbation_size)))
        initial_b = InitialData(profiles=(bumped,) + scenario.initial.profiles[1:])

    all_delays = set(scenario.delays) | set(c.tau for c in model_b.classes)
    dt = _common_dt(scenario, all_delays, scenario.T)
    times = np.linspace(0.0, scenario.T, n_snapshots)

    sc_a = dataclasses.replace(scenario, dt=dt)
    sc_b = dataclasses.replace(
        scenario, dt=dt, model=model_b, initial=initial_b, name=scenario.name + "-perturbed"
    )
    traj_a = run(sc_a, snapshot_times=times, diag_stride=0)
    traj_b = run(sc_b, snapshot_times=times, diag_stride=0)
    _maybe_bundle(traj_a, bundle_dir, "base")
    _maybe_bundle(traj_b, bundle_dir, "perturbed")

    delta = l1_distance(traj_a, traj_b, 0.0)
    rows = []
    for t in times:
        dist = l1_distance(traj_a, traj_b, t)
        rows.append(
            {
                "t": float(t),
                "l1_distance": dist,
                "amplification": dist / delta if delta > 0 else math.nan,
            }
        )

    return SweepResult(
        kind="stability",
        parameters=("t",),
        rows=rows,
        metadata={
            "delta0": delta,
            "dt": dt,
            "perturbation_size": perturbation_size,
            "delays_b": list(delays_b) if delays_b is not None else None,
            "exact_equal": bool(delta == 0.0 and all(r["l1_distance"] == 0.0 for r in rows)),
        },
    )

"""Command-line entry points.

Subcommands:

    run      simulate a scenario (config file or named preset) and write a bundle
    sweep    delay | penetration | refine | stability studies
    check    validate a scenario and print the planned dt / lambda / h_i
    presets  list the named presets

Exit codes: 0 success, 1 usage, 2 validation, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bundles import write_bundle, write_sweep
from .config import parse_scenario, serialize_scenario
from .diagnostics import DEFAULT_KAPPA_SEED, entropy_kappa_set, entropy_residual
from .errors import BoundViolation, ParseError, RingflowError, SchemaError, ValidationError
from .harness import delay_sweep, penetration_sweep, refinement_study, stability_experiment
from .model import Coupling, Scenario
from .scenarios import PRESETS, build_preset
from .solver import prepare, run


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_float_list(text: str) -> list[float]:
    """Comma list '0,0.5,1' or range 'start:stop:step' (inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise _UsageError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise _UsageError("range step must be positive")
        count = int(round((stop - start) / step))
        values = [round(start + k * step, 12) for k in range(count + 1)]
        return [v for v in values if v <= stop + 1e-12]
    return [float(p) for p in text.split(",") if p.strip()]


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="scenario config file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named preset")
    p.add_argument("--no-saturation", action="store_true", help="overtaking: drop saturation")
    p.add_argument("--coupling", choices=[c.value for c in Coupling],
                   help="invariant-domain: coupling mode")
    p.add_argument("--tau1", type=float, help="delay-convergence: class-1 delay")
    p.add_argument("--p", type=float, help="penetration/perturbation: autonomous share")
    p.add_argument("--speed", choices=("greenshields", "triangular"),
                   help="av-penetration: speed family")
    p.add_argument("--tau-h", type=float, help="human-class delay")
    p.add_argument("--dx", type=float, help="override cell width")
    p.add_argument("--T", type=float, help="override horizon")
    p.add_argument("--cfl-safety", type=float, help="override CFL safety factor")
    p.add_argument("--dt", type=float, help="force an explicit time step")


def _resolve_scenario(args) -> Scenario:
    import dataclasses

    if (args.config is None) == (args.preset is None):
        raise _UsageError("give exactly one of --config or --preset")
    if args.config is not None:
        scenario = parse_scenario(args.config)
        overrides = {}
        if args.dx is not None:
            overrides["dx"] = args.dx
        if args.T is not None:
            overrides["T"] = args.T
        if args.cfl_safety is not None:
            overrides["cfl_safety"] = args.cfl_safety
        if args.dt is not None:
            overrides["dt"] = args.dt
        return dataclasses.replace(scenario, **overrides) if overrides else scenario

    kwargs = {}
    if args.dx is not None:
        kwargs["dx"] = args.dx
    if args.T is not None:
        kwargs["T"] = args.T
    if args.cfl_safety is not None:
        kwargs["cfl_safety"] = args.cfl_safety
    name = args.preset
    if name == "overtaking" and args.no_saturation:
        kwargs["with_saturation"] = False
    if name == "invariant-domain" and args.coupling is not None:
        kwargs["coupling"] = Coupling(args.coupling)
    if name == "delay-convergence":
        kwargs["tau1"] = args.tau1 if args.tau1 is not None else 2.5
    if name in ("av-penetration", "perturbation"):
        kwargs["p"] = args.p if args.p is not None else 0.5
        if args.tau_h is not None:
            kwargs["tau_h"] = args.tau_h
    if name == "av-penetration" and args.speed is not None:
        kwargs["speed_family"] = args.speed
    scenario = build_preset(name, **kwargs)
    if args.dt is not None:
        import dataclasses

        scenario = dataclasses.replace(scenario, dt=args.dt)
    return scenario


def _cmd_presets(_args) -> int:
    width = max(len(n) for n in PRESETS)
    for name in sorted(PRESETS):
        _, _, description = PRESETS[name]
        print(f"{name:<{width}}  {description}")
    return 0


def _cmd_check(args) -> int:
    scenario = _resolve_scenario(args)
    prep = prepare(scenario)
    tg = prep.time_grid
    print(f"scenario      {scenario.name}")
    print(f"n_cells       {prep.grid.n_cells}")
    print(f"cfl_bound     {prep.bound!r}")
    print(f"dt            {tg.dt!r}")
    print(f"lambda        {tg.lam!r}")
    print(f"n_steps       {tg.n_steps}")
    for cls, h in zip(scenario.model.classes, tg.delay_steps):
        print(f"h[{cls.name}]       {h}")
    return 0


def _cmd_run(args) -> int:
    scenario = _resolve_scenario(args)
    snapshot_times = None
    if args.snapshot_times:
        snapshot_times = _parse_float_list(args.snapshot_times)

    record_steps = ()
    if args.entropy_samples > 0:
        prep = prepare(scenario)
        n_steps = prep.time_grid.n_steps
        if n_steps > 0:
            count = min(args.entropy_samples, n_steps)
            record_steps = np.unique(
                np.round(np.linspace(0, n_steps - 1, count)).astype(int)
            )

    traj = run(
        scenario,
        snapshot_times=snapshot_times,
        record_steps=record_steps,
        diag_stride=args.stride,
    )

    entropy_by_step = {}
    if len(record_steps):
        kappas = entropy_kappa_set(scenario.model, seed=args.seed)
        for rec in traj.records:
            worst = max(
                entropy_residual(rec, scenario.model, kappa).max_residual for kappa in kappas
            )
            entropy_by_step[rec.step] = worst

    out = args.out if args.out is not None else Path("runs") / scenario.name
    paths = write_bundle(traj, out, entropy_by_step=entropy_by_step)
    serialize_scenario(scenario, Path(out) / "scenario.yaml")
    print(f"wrote bundle to {Path(out)}")
    for key, path in paths.items():
        print(f"  {key}: {path}")
    return 0


def _cmd_sweep(args) -> int:
    kind = args.kind
    out = args.out if args.out is not None else Path("runs") / f"sweep-{kind}"
    bundle_dir = (Path(out) / "runs") if args.bundles else None
    if kind == "delay":
        taus = _parse_float_list(args.taus if args.taus else "5,4,3,2,1,0")
        result = delay_sweep(
            taus, dx=_or(args.dx, 5e-3), T=_or(args.T, 30.0), bundle_dir=bundle_dir
        )
    elif kind == "penetration":
        ps = _parse_float_list(args.p_grid if args.p_grid else "0:1:0.1")
        tau_hs = _parse_float_list(args.tau_h_grid if args.tau_h_grid else "2.5")
        result = penetration_sweep(
            ps,
            speed_family=args.speed or "triangular",
            tau_h_list=tau_hs,
            dx=_or(args.dx, 5e-3),
            T=_or(args.T, 30.0),
            bundle_dir=bundle_dir,
        )
    elif kind == "refine":
        scenario = _resolve_scenario(args)
        dx_list = _parse_float_list(args.dx_list if args.dx_list else "0.02,0.01,0.005")
        result = refinement_study(scenario, dx_list)
    elif kind == "stability":
        scenario = _resolve_scenario(args)
        result = stability_experiment(
            scenario, perturbation_size=args.delta, bundle_dir=bundle_dir
        )
    else:  # pragma: no cover - argparse restricts choices
        raise _UsageError(f"unknown sweep kind {kind!r}")

    paths = write_sweep(result, out)
    print(f"wrote sweep ({len(result.rows)} rows) to {Path(out)}")
    for key, path in paths.items():
        print(f"  {key}: {path}")
    return 0


def _or(value, default):
    return default if value is None else value


def build_parser() -> _Parser:
    parser = _Parser(prog="ringflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario and write a bundle")
    _add_scenario_args(p_run)
    p_run.add_argument("--out", type=Path, help="bundle output directory")
    p_run.add_argument("--snapshot-times", help="comma list or start:stop:step")
    p_run.add_argument("--stride", type=int, default=1, help="diagnostics stride (0 = off)")
    p_run.add_argument("--entropy-samples", type=int, default=0,
                       help="check the entropy inequality on this many sampled steps")
    p_run.add_argument("--seed", type=int, default=DEFAULT_KAPPA_SEED,
                       help="seed for the random entropy constants")

    p_check = sub.add_parser("check", help="validate and print the planned discretization")
    _add_scenario_args(p_check)

    p_sweep = sub.add_parser("sweep", help="multi-run studies")
    p_sweep.add_argument("kind", choices=("delay", "penetration", "refine", "stability"))
    _add_scenario_args(p_sweep)
    p_sweep.add_argument("--out", type=Path, help="sweep output directory")
    p_sweep.add_argument("--taus", help="delay sweep grid, e.g. '5,4,3,2,1,0'")
    p_sweep.add_argument("--p-grid", help="penetration grid, e.g. '0:1:0.1'")
    p_sweep.add_argument("--tau-h-grid", help="human delays, e.g. '2.0,2.5'")
    p_sweep.add_argument("--dx-list", help="refinement grids, e.g. '0.02,0.01,0.005'")
    p_sweep.add_argument("--delta", type=float, default=1e-3,
                         help="stability: uniform initial bump size")
    p_sweep.add_argument("--bundles", action="store_true",
                         help="also write one full bundle per run under OUT/runs/")

    sub.add_parser("presets", help="list named presets")
    return parser


_COMMANDS = {
    "run": _cmd_run,
    "check": _cmd_check,
    "sweep": _cmd_sweep,
    "presets": _cmd_presets,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1

    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, SchemaError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (BoundViolation, RingflowError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

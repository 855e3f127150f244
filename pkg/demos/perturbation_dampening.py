"""Decay of a class-share perturbation at different autonomous shares.

The total density starts exactly constant; only the split between humans and
autonomous vehicles is perturbed in space.  The induced oscillations decay
faster the larger the autonomous share.
"""

import argparse

import ringflow as rf
from ringflow.bundles import write_bundle


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dx", type=float, default=0.005)
    ap.add_argument("--T", type=float, default=30.0)
    ap.add_argument("--ps", default="0.2,0.4,0.6,0.8")
    ap.add_argument("--out", default="runs/demo-perturbation")
    args = ap.parse_args()

    for p in (float(v) for v in args.ps.split(",")):
        sc = rf.preset_perturbation(p, dx=args.dx, T=args.T)
        traj = rf.run(sc)
        tv = traj.diagnostics.tv_r
        print(f"p = {p:g}  TV(r(0)) = {tv[0]:.4f}  sup_t TV = {tv.max():.4f}  "
              f"TV(r(T)) = {tv[-1]:.4f}")
        write_bundle(traj, f"{args.out}-p{p:g}")
    print(f"bundles in {args.out}-p*;  render kind tv_vs_time with plotview")


if __name__ == "__main__":
    main()

"""Convergence to the non-delayed dynamics as the reaction time vanishes.

One of two otherwise identical classes carries a delay tau1; as tau1 -> 0
the final-time solution approaches the tau1 = 0 reference in L1.
"""

import argparse

import ringflow as rf
from ringflow.bundles import write_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dx", type=float, default=0.005)
    ap.add_argument("--T", type=float, default=30.0)
    ap.add_argument("--taus", default="5,4,3,2,1,0")
    ap.add_argument("--out", default="runs/demo-delay-sweep")
    args = ap.parse_args()

    taus = [float(t) for t in args.taus.split(",")]
    result = rf.delay_sweep(taus, dx=args.dx, T=args.T)
    print(f"{'tau1':>6} {'h1':>6} {'class-summed L1':>16} {'r-profile L1':>14}")
    for row in result.rows:
        print(
            f"{row['tau1']:>6g} {row['h1']:>6d} {row['l1_distance_to_ref']:>16.6f} "
            f"{row['r_distance_to_ref']:>14.6f}"
        )
    write_sweep(result, args.out)
    print(f"table in {args.out}/sweep.csv")


if __name__ == "__main__":
    main()

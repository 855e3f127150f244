"""Oscillation functional J(p) across the autonomous-vehicle share.

Humans look a short distance ahead with linearly fading attention and react
with a delay; autonomous vehicles look twice as far, uniformly, and react
instantly.  J integrates the spatial total variation of the total density
over the whole horizon: lower J means calmer traffic.
"""

import argparse

import ringflow as rf
from ringflow.bundles import write_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dx", type=float, default=0.005)
    ap.add_argument("--T", type=float, default=30.0)
    ap.add_argument("--speed", default="triangular", choices=("greenshields", "triangular"))
    ap.add_argument("--tau-h", default="2.5", help="comma list of human delays")
    ap.add_argument("--p-step", type=float, default=0.1)
    ap.add_argument("--out", default="runs/demo-penetration")
    args = ap.parse_args()

    count = round(1.0 / args.p_step)
    ps = [round(k * args.p_step, 12) for k in range(count + 1)]
    tau_hs = [float(t) for t in args.tau_h.split(",")]
    result = rf.penetration_sweep(ps, speed_family=args.speed, tau_h_list=tau_hs,
                                  dx=args.dx, T=args.T)
    for tau in tau_hs:
        rows = [r for r in result.rows if r["tau_h"] == tau]
        js = ", ".join(f"{r['p']:g}: {r['j_functional']:.2f}" for r in rows)
        print(f"tau_h = {tau:g}  J(p) = {{{js}}}")
    write_sweep(result, args.out)
    print(f"table in {args.out}/sweep.csv;  render kind functional_vs_p with plotview")


if __name__ == "__main__":
    main()

"""Self-convergence of the scheme under grid halving.

Errors between successive grids shrink at roughly first order, matching the
upwind structure of the flux.
"""

import argparse

import ringflow as rf


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--T", type=float, default=30.0)
    ap.add_argument("--dx-list", default="0.02,0.01,0.005,0.0025")
    args = ap.parse_args()

    sc = rf.preset_delay_convergence(0.0, T=args.T)
    dx_list = [float(v) for v in args.dx_list.split(",")]
    result = rf.refinement_study(sc, dx_list)
    for row in result.rows:
        eoc = f"{row['eoc']:.3f}" if row["eoc"] == row["eoc"] else "  -  "
        err = f"{row['error_to_next']:.3e}" if row["error_to_next"] == row["error_to_next"] else "  -  "
        print(f"dx = {row['dx']:<8g} cells = {row['n_cells']:<5d} "
              f"error-to-next = {err}  EOC = {eoc}  ({row['runtime_s']:.1f}s)")


if __name__ == "__main__":
    main()

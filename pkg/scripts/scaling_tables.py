"""Hardware-scaling tables: chi_max and T_cav over (N, g_max) grids.

Emits one CSV per problem class suitable for heat-map plotting, plus the
SK7 N = 1000 reference point.

Usage: python3 scripts/scaling_tables.py --outdir scaling_out
"""

import argparse
import os

import numpy as np

from floqkpo.scaling import HardwareLimits, chi_max, sweep

GHZ = 2 * np.pi * 1e9
MHZ = 2 * np.pi * 1e6


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="scaling_out")
    ap.add_argument("--dmax-ghz", type=float, default=5.0)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    n_grid = [int(v) for v in np.geomspace(4, 4096, 11).round()]
    g_grid = list(np.geomspace(1.0, 100.0, 9) * MHZ)
    for class_tag in ("sk7", "dense", "cubic"):
        text = sweep(n_grid, class_tag, g_grid=g_grid, delta_max=args.dmax_ghz * GHZ)
        path = os.path.join(args.outdir, f"scaling_{class_tag}.csv")
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path}")

    point = chi_max(1000, "sk7", HardwareLimits(g_max=20 * MHZ, delta_max=5 * GHZ))
    print(
        f"SK7 N=1000 reference: chi/2pi = {point.chi_max / (2 * np.pi) / 1e3:.2f} kHz, "
        f"T_cav = {point.t_cav_min * 1e6:.1f} us ({point.limiting_constraint})"
    )


if __name__ == "__main__":
    main()

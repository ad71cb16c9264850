"""Design-error landscape over (eta, N), one CSV row per grid point.

Reproduces the error-vs-eta sweep used to justify the per-class eta
prescriptions: for each N and eta, solve the Floquet design for a handful
of SK7 instances with uniform native couplings J = lambda_C / eta and
record the mean verification error.

Usage: python3 scripts/design_error_sweep.py --out error_sweep.csv
"""

import argparse

import numpy as np

from floqkpo import design
from floqkpo.problems import generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--class", dest="class_tag", default="sk7", choices=["sk7", "dense", "cubic"])
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--eta", type=float, nargs="+", default=[0.0125, 0.025, 0.05, 0.1, 0.2, 0.4])
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--out", default="error_sweep.csv")
    args = ap.parse_args()

    rows = ["n,eta,mean_error,max_error"]
    for n in args.n:
        for eta in args.eta:
            errors = []
            for seed in range(args.instances):
                c = generate(args.class_tag, n, seed)
                prob = design.DesignProblem(c=c, lambda_c=1.0, j=design.NativeCouplingMatrix.uniform(n, 1.0 / eta))
                sol = design.solve_design(prob)
                errors.append(sol.error)
            rows.append(f"{n},{eta},{np.mean(errors):.6e},{np.max(errors):.6e}")
            print(rows[-1])
    with open(args.out, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

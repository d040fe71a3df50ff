#!/usr/bin/env python3
"""Residuals of C_phi^* = T_f C_{phi^-1} and of the semi-multiplication factorization against degree."""

from __future__ import annotations

import argparse
import csv
import sys

from ballop.adjointlab import lemma36_convergence, verify_lemma36, verify_lemma37_factorization
from ballop.lft import ball_automorphism
from ballop.series import PowerSeries
from ballop.spaces import SpaceSpec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degrees", type=int, nargs="+", default=[4, 8, 12, 16])
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args(argv)

    cases = [
        ("disk involution a=1/2", SpaceSpec.hardy(1), ball_automorphism([0.5])),
        ("ball involution a=(1/2,0)", SpaceSpec.bergman(2, 0.0), ball_automorphism([0.5, 0.0])),
    ]
    rows = [["case", "space", "D", "residual_fixed_2D", "residual_escalated", "factorization_residual"]]
    for name, space, phi in cases:
        u = PowerSeries.constant(space.N, 1) + PowerSeries.monomial((1,) + (0,) * (space.N - 1), 1, 0.5)
        degrees = [D for D in args.degrees if space.N == 1 or D <= 12]
        for D, fixed in lemma36_convergence(space, phi, degrees):
            esc = verify_lemma36(space, phi, D).residual
            fact = verify_lemma37_factorization(space, phi, u, u, min(D, 6)).residual
            rows.append([name, space.label(), D, f"{fixed:.6e}", f"{esc:.6e}", f"{fact:.6e}"])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    csv.writer(out, lineterminator="\n").writerows(rows)
    if args.out:
        out.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())

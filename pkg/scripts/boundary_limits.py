#!/usr/bin/env python3
"""Boundary limits of backward cross products: extrapolated vs predicted, as CSV."""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from ballop.commutator import lemma32_scan
from ballop.lft import disk_map, random_automorphism, random_sphere_point
from ballop.spaces import SpaceSpec


def spaces(N: int):
    return [SpaceSpec.hardy(N)] + [SpaceSpec.bergman(N, s) for s in (0.0, 1.0, 2.5)]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=10, help="random automorphism pairs per dimension")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kmax", type=int, default=20)
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args(argv)

    rows = [["case", "space", "N", "limit_re", "limit_im", "predicted", "abs_error", "extrapolation_error", "agree"]]

    def record(case, space, scan):
        lim = complex(scan.limit)
        pred = complex(scan.predicted).real
        rows.append([case, space.label(), space.N, f"{lim.real:.17g}", f"{lim.imag:.17g}", f"{pred:.17g}",
                     f"{abs(lim - pred):.3e}", f"{scan.error:.3e}", int(scan.agreement)])

    hyperbolic = disk_map(1, 0.5, 0.5, 1)
    for space in spaces(1):
        record("hyperbolic@1", space, lemma32_scan(space, hyperbolic, hyperbolic, [1.0], [1.0], kmax=args.kmax))
    rng = np.random.default_rng(args.seed)
    for N in (1, 2):
        for i in range(args.pairs):
            space = spaces(N)[i % 4]
            phi, psi = random_automorphism(rng, N), random_automorphism(rng, N)
            z1 = random_sphere_point(rng, N)
            z2 = psi.inverse()(phi(z1))
            record(f"random-{N}-{i}", space, lemma32_scan(space, phi, psi, z1, z2 / np.linalg.norm(z2), kmax=args.kmax))

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    csv.writer(out, lineterminator="\n").writerows(rows)
    if args.out:
        out.close()
    return 0 if all(r[-1] for r in rows[1:]) else 1


if __name__ == "__main__":
    sys.exit(main())

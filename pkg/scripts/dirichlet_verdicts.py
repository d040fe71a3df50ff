#!/usr/bin/env python3
"""Dirichlet-space verdicts for reference pairs, with the log-index singular values behind them."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ballop.commutator import HypothesisError, theorem42_verdict, theorem43_verdict, theorem44_classify
from ballop.lft import ball_automorphism, diagonal_map, disk_map, unitary_map


def parabolic(tau):
    return disk_map(2 - tau, tau, -tau, 2 + tau)


def hyperbolic_with(p, q, lam):
    M = np.array([[1, -p], [1, -q]], dtype=complex)
    F = np.linalg.inv(M) @ np.diag([lam, 1]) @ M
    return disk_map(F[0, 0], F[0, 1], F[1, 0], F[1, 1])


CASES = [
    ("4.2", "diagonal pair diag(1,1/2), diag(1,1/3)", diagonal_map([1, 0.5]), diagonal_map([1, 1 / 3])),
    ("4.2", "parabolic pair at 1", parabolic(1.0), parabolic(0.5 + 0.3j)),
    ("4.2", "hyperbolic vs quarter turn", disk_map(1, 0.5, 0.5, 1), disk_map(1j, 0, 0, 1)),
    ("4.3", "involution vs quarter turn", ball_automorphism([0.5]), disk_map(1j, 0, 0, 1)),
    ("4.3", "commuting rotations", disk_map(1j, 0, 0, 1), disk_map(-1, 0, 0, 1)),
    ("4.3", "swap vs diag(1, i)", unitary_map(np.array([[0, 1], [1, 0]])), diagonal_map([1, 1j])),
    ("4.4", "hyperbolic pair (1, 2) / (1, 1/2)", hyperbolic_with(1, 2, 0.5), hyperbolic_with(1, 0.5, 2)),
    ("4.4", "parabolic pair at 1", parabolic(1.0), parabolic(0.5 + 0.3j)),
    ("4.4", "parabolic at 1 vs parabolic at -1", parabolic(1.0), disk_map(1, -1, 1, 3)),
]

VERDICTS = {"4.2": theorem42_verdict, "4.3": theorem43_verdict, "4.4": theorem44_classify}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", choices=sorted(VERDICTS), default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    from ballop.cli import to_jsonable

    results = []
    for th, name, phi, psi in CASES:
        if args.only and th != args.only:
            continue
        try:
            results.append({"case": name, **VERDICTS[th](phi, psi).to_dict()})
        except HypothesisError as exc:
            results.append({"case": name, "theorem": th, "hypothesis_error": str(exc)})
    text = json.dumps(to_jsonable(results), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.get("status", "coherent") == "coherent" for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())

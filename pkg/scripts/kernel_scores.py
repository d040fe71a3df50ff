#!/usr/bin/env python3
"""Kernel scores of [C_psi^*, C_phi] for reference pairs, at base and doubled resolution."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ballop.commutator import SCORE_EPS, commutator_kernel_score
from ballop.lft import ball_automorphism, diagonal_map, disk_map, unitary_map
from ballop.spaces import SpaceSpec

PAIRS = {
    "rotations (commuting)": (1, disk_map(1j, 0, 0, 1), disk_map(-1, 0, 0, 1)),
    "diagonal unitaries (commuting)": (2, diagonal_map([1j, -1]), diagonal_map([1, 1j])),
    "involution vs quarter turn": (1, ball_automorphism([0.5]), disk_map(1j, 0, 0, 1)),
    "swap vs diag(1, i)": (2, unitary_map(np.array([[0, 1], [1, 0]])), diagonal_map([1, 1j])),
    "ball involution vs swap": (2, ball_automorphism([0.5, 0.0]), unitary_map(np.array([[0, 1], [1, 0]]))),
}

RESOLUTIONS = {"base": dict(m=8, D=8, kmax=13), "2m": dict(m=16, D=8, kmax=13),
               "2D": dict(m=8, D=16, kmax=13), "2k": dict(m=8, D=8, kmax=26)}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, nargs="*", default=[0.0, 2.5], help="Bergman weights to include")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    results = []
    for name, (N, phi, psi) in PAIRS.items():
        for space in [SpaceSpec.hardy(N)] + [SpaceSpec.bergman(N, s) for s in args.s]:
            scores = {k: commutator_kernel_score(space, phi, psi, seed=args.seed, floors=False, **kw).score
                      for k, kw in RESOLUTIONS.items()}
            results.append({"pair": name, "space": space.to_dict(), "scores": scores,
                            "compact_by_score": scores["base"] < SCORE_EPS})
    text = json.dumps(results, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

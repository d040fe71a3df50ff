"""Command-line front end.

Exit codes: 0 pass, 1 analytic failure or inconclusive verdict, 2 usage or
map-spec error, 3 violated hypothesis.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ballop import __version__
from ballop.lft import (
    LinearFractionalMap,
    NotABallMapError,
    ball_automorphism,
    diagonal_map,
    disk_map,
    identity_map,
    random_ball_point,
    unitary_map,
)
from ballop.spaces import SpaceSpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_HYPOTHESIS = 0, 1, 2, 3

IDENTITY_TOL = 1e-10
LEMMA34_TOL = 1e-10
LEMMA36_TOL = 1e-6
LEMMA37_TOL = 1e-8
ROUTE_TOL = 1e-10


class UsageError(ValueError):
    pass


# -- map specs -----------------------------------------------------------------


def _cplx(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise UsageError(f"complex value must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    raise UsageError(f"not a number: {x!r}")


def _cvec(x) -> np.ndarray:
    if not isinstance(x, list):
        raise UsageError(f"expected a list, got {x!r}")
    return np.array([_cplx(v) for v in x], dtype=complex)


def _cmat(x) -> np.ndarray:
    if not isinstance(x, list) or not all(isinstance(row, list) for row in x):
        raise UsageError("expected a list of rows")
    return np.array([[_cplx(v) for v in row] for row in x], dtype=complex)


def _load_json(text: str):
    p = Path(text)
    try:
        if not text.lstrip().startswith(("{", "[")) and p.exists():
            text = p.read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON: {exc}") from exc


def map_from_spec(spec) -> LinearFractionalMap:
    """Build a map from a parsed map-spec object (general or convenience form)."""
    if not isinstance(spec, dict):
        raise UsageError("map spec must be a JSON object")
    kind = spec.get("kind", "general")
    try:
        if kind == "general":
            for key in ("A", "B", "C", "d"):
                if key not in spec:
                    raise UsageError(f"map spec missing {key!r}")
            m = LinearFractionalMap(_cmat(spec["A"]), _cvec(spec["B"]), _cvec(spec["C"]), _cplx(spec["d"]))
            if "N" in spec and int(spec["N"]) != m.N:
                raise UsageError(f"N={spec['N']} does not match A")
        elif kind == "automorphism":
            m = ball_automorphism(_cvec(spec["a"]))
            if "U" in spec:
                m = unitary_map(_cmat(spec["U"])) @ m
        elif kind == "unitary":
            m = unitary_map(_cmat(spec["U"]))
        elif kind == "diagonal":
            m = diagonal_map(_cvec(spec["diag"]))
        elif kind == "disk":
            m = disk_map(*(_cplx(spec[k]) for k in ("a", "b", "c", "d")))
        elif kind == "identity":
            m = identity_map(int(spec["N"]))
        else:
            raise UsageError(f"unknown map kind {kind!r}")
    except KeyError as exc:
        raise UsageError(f"map spec missing {exc.args[0]!r}") from exc
    except (NotABallMapError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"invalid map: {exc}") from exc
    if not m.is_self_map():
        raise UsageError(f"map is not a self-map of the ball (sup norm {m.sup_norm:.6g})")
    return m


def parse_map(text: str) -> LinearFractionalMap:
    return map_from_spec(_load_json(text))


def map_to_dict(m: LinearFractionalMap) -> dict:
    return {"N": m.N, "A": m.A, "B": m.B, "C": m.C, "d": m.d}


def parse_point(text: str | None, N: int) -> np.ndarray:
    if text is None:
        z = np.zeros(N, dtype=complex)
        z[0] = 1.0
        return z
    val = _load_json(text)
    z = _cvec(val) if isinstance(val, list) and (not val or isinstance(val[0], list) or N > 1) else None
    if z is None:
        z = np.array([_cplx(val)], dtype=complex) if not isinstance(val, list) else _cvec(val)
    if len(z) != N:
        raise UsageError(f"point has dimension {len(z)}, maps have N={N}")
    return z


# -- reports -------------------------------------------------------------------


def to_jsonable(x):
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [to_jsonable(float(x.real)), to_jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x) + 0.0  # folds -0.0
        return x if math.isfinite(x) else repr(x)
    return x


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_csv(path: str, rows: list[list[str]]):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    Path(path).write_text(buf.getvalue())


@dataclass
class RunConfig:
    command: str
    space: str
    N: int
    s: float
    map: str | None
    map2: str | None
    D: int
    rmax_exp: int
    samples: int
    seed: int
    out: str | None
    csv: str | None
    zeta1: str | None
    zeta2: str | None
    lemma34: bool
    lemma36: bool
    lemma37: bool
    theorem: str | None

    def space_spec(self) -> SpaceSpec:
        if self.space == "hardy":
            return SpaceSpec.hardy(self.N)
        if self.space == "bergman":
            return SpaceSpec.bergman(self.N, self.s)
        return SpaceSpec.dirichlet(self.N)


# -- commands ----------------------------------------------------------------------


def cmd_adjoint_check(cfg: RunConfig, phi: LinearFractionalMap, psi) -> tuple[int, dict]:
    from ballop import adjointlab as al

    space = cfg.space_spec()
    rng = np.random.default_rng(cfg.seed)
    checks = {}
    if space.kind == "dirichlet":
        from ballop.dirichletops import adjoint_route_gap

        gap = adjoint_route_gap(phi, min(cfg.D, 8))
        checks["dirichlet_adjoint_route_gap"] = {"residual": gap, "pass": gap < ROUTE_TOL}
    else:
        res = al.adjoint_identity_sweep(space, phi, rng, cfg.samples)
        checks["adjoint_identity"] = {"residual": res, "samples": cfg.samples, "pass": res < IDENTITY_TOL}
    if cfg.lemma34:
        if phi.N != 1 or not phi.is_automorphism():
            raise al_hypothesis("--lemma34 needs a disk automorphism")
        p = al.normalize_determinant(phi)
        t = 1.0 if space.kind == "dirichlet" else space.t
        worst = max(al.verify_lemma34_normalization(p, random_ball_point(rng, 1), t) for _ in range(cfg.samples))
        checks["lemma34"] = {"residual": worst, "t": t, "pass": worst < LEMMA34_TOL}
    if cfg.lemma36:
        if not phi.is_automorphism():
            raise al_hypothesis("--lemma36 needs an automorphism")
        rep = al.verify_lemma36(space, phi, cfg.D)
        checks["lemma36"] = {**rep.to_dict(), "pass": rep.residual < LEMMA36_TOL}
    if cfg.lemma37:
        if not phi.is_automorphism():
            raise al_hypothesis("--lemma37 needs an automorphism")
        from ballop.series import PowerSeries

        e1 = (1,) + (0,) * (phi.N - 1)
        u = PowerSeries.constant(phi.N, 1) + PowerSeries.monomial(e1, 1, 0.5)
        v = PowerSeries.constant(phi.N, 1) + PowerSeries.monomial(e1, 1, 1 / 3)
        rep = al.verify_lemma37_factorization(space, phi, u, v, min(cfg.D, 6))
        checks["lemma37"] = {**rep.to_dict(), "symbols": "u = 1 + z1/2, v = 1 + z1/3", "pass": rep.residual < LEMMA37_TOL}
    ok = all(c["pass"] for c in checks.values())
    return (EXIT_OK if ok else EXIT_FAIL), {"checks": checks, "pass": ok}


def al_hypothesis(msg: str):
    from ballop.commutator import HypothesisError

    return HypothesisError(msg)


def cmd_limit_scan(cfg: RunConfig, phi, psi) -> tuple[int, dict]:
    from ballop.commutator import lemma32_scan

    space = cfg.space_spec()
    if space.kind == "dirichlet":
        raise UsageError("limit-scan needs --space hardy or bergman")
    psi = psi or phi
    z1, z2 = parse_point(cfg.zeta1, phi.N), parse_point(cfg.zeta2, phi.N)
    scan = lemma32_scan(space, phi, psi, z1, z2, kmax=cfg.rmax_exp)
    if cfg.csv:
        write_csv(cfg.csv, scan.csv_rows())
    return (EXIT_OK if scan.agreement else EXIT_FAIL), {"scan": scan.to_dict(), "zeta1": z1, "zeta2": z2}


def _need_second(psi):
    if psi is None:
        raise UsageError("this command needs --map2")
    return psi


def cmd_verdict(cfg: RunConfig, phi, psi) -> tuple[int, dict]:
    from ballop import commutator as cm

    psi = _need_second(psi)
    th = cfg.theorem
    if th is None:
        raise UsageError("verdict needs --theorem")
    if th == "3.1":
        if cfg.space == "dirichlet":
            raise UsageError("theorem 3.1 concerns Hardy/Bergman spaces")
        v = cm.theorem31_verdict(phi, psi, cfg.space_spec(), m=cfg.samples, D=min(cfg.D, 8), kmax=cfg.rmax_exp,
                                 seed=cfg.seed)
    else:
        if cfg.space != "dirichlet":
            raise UsageError(f"theorem {th} concerns the Dirichlet space")
        if th == "4.2":
            v = cm.theorem42_verdict(phi, psi)
        elif th == "4.3":
            v = cm.theorem43_verdict(phi, psi)
        else:
            if phi.N != 1 or (phi.is_automorphism() and psi.is_automorphism()):
                raise UsageError("theorem 4.4 needs disk maps, at least one not an automorphism")
            v = cm.theorem44_classify(phi, psi)
    code = EXIT_OK if v.status == "coherent" else EXIT_FAIL
    return code, {"verdict": v.to_dict(), "r_max": 1.0 - 2.0**-cfg.rmax_exp, "D": cfg.D,
                  "agreement": v.status == "coherent"}


def cmd_commutator_report(cfg: RunConfig, phi, psi) -> tuple[int, dict]:
    from ballop import commutator as cm

    psi = _need_second(psi)
    space = cfg.space_spec()
    if space.kind == "dirichlet":
        from ballop.dirichletops import dirichlet_commutator_matrix, log_index_floor

        fl = log_index_floor(phi, psi)
        out = {"log_index_floor": [list(x) for x in fl]}
        M = dirichlet_commutator_matrix(phi, psi, cfg.D)
    else:
        from ballop.opalg import commutator_matrix

        ks = cm.commutator_kernel_score(space, phi, psi, m=cfg.samples, D=min(cfg.D, 8), kmax=cfg.rmax_exp,
                                        seed=cfg.seed)
        out = {"score": ks.score, "per_direction": ks.per_direction, "floor": [list(x) for x in ks.floors],
               "r_max": ks.r_max, "derivative_products": ks.derivative_products,
               "compact_by_score": ks.score < cm.SCORE_EPS}
        M = commutator_matrix(space, phi, psi, cfg.D)
    out["singular_values"] = np.linalg.svd(M.M, compute_uv=False)[:8]
    if cfg.csv:
        from ballop.opalg import write_matrix_csv

        write_matrix_csv(cfg.csv, M)
    return EXIT_OK, out


def cmd_dirichlet_report(cfg: RunConfig, phi, psi) -> tuple[int, dict]:
    from ballop import dirichletops as do
    from ballop.series import PowerSeries

    psi = _need_second(psi)
    degree = min(cfg.D, do.ZERO_TEST_DEGREE)
    zt = do.commutator_zero_test(phi, psi, degree=degree)
    f = PowerSeries.monomial((1,) + (0,) * (phi.N - 1), 2 * degree)
    sign_gap = do.dirichlet_norm(do.dirichlet_commutator_apply(phi, psi, f, flipped_sign=True)
                                 - do.dirichlet_commutator_compositional(phi, psi, f))
    ok = zt.route_gap < ROUTE_TOL
    return (EXIT_OK if ok else EXIT_FAIL), {
        "zero_test": asdict(zt),
        "route_gap": zt.route_gap,
        "flipped_bracket_gap_on_z1": sign_gap,
        "pass": ok,
    }


COMMANDS = {
    "adjoint-check": cmd_adjoint_check,
    "limit-scan": cmd_limit_scan,
    "verdict": cmd_verdict,
    "commutator-report": cmd_commutator_report,
    "dirichlet-report": cmd_dirichlet_report,
}


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", choices=["hardy", "bergman", "dirichlet"], default=None,
                        help="function space (default hardy; dirichlet for theorems 4.x)")
    common.add_argument("--s", type=float, default=0.0, help="Bergman weight exponent s > -1")
    common.add_argument("--N", type=int, default=None, help="ball dimension (default: from the map)")
    common.add_argument("--map", required=True, help="map spec: JSON file path or inline JSON")
    common.add_argument("--map2", default=None, help="second map spec")
    common.add_argument("--D", type=int, default=16, help="truncation degree")
    common.add_argument("--rmax-exp", type=int, default=20, help="radial grid reaches r = 1 - 2^-k")
    common.add_argument("--samples", type=int, default=None, help="random samples / boundary directions")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="JSON report path (default stdout)")
    common.add_argument("--csv", default=None, help="CSV output path")

    p = argparse.ArgumentParser(prog="ballop", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ballop {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("adjoint-check", parents=[common], help="pointwise adjoint identities")
    a.add_argument("--lemma34", action="store_true")
    a.add_argument("--lemma36", action="store_true")
    a.add_argument("--lemma37", action="store_true")
    s = sub.add_parser("limit-scan", parents=[common], help="boundary limit of backward cross inner products")
    s.add_argument("--zeta1", default=None, help="boundary point as JSON (default e1)")
    s.add_argument("--zeta2", default=None)
    v = sub.add_parser("verdict", parents=[common], help="compactness verdict for [C_psi^*, C_phi]")
    v.add_argument("--theorem", choices=["3.1", "4.2", "4.3", "4.4"], required=True)
    sub.add_parser("commutator-report", parents=[common], help="kernel score and singular values")
    sub.add_parser("dirichlet-report", parents=[common], help="Dirichlet commutator routes and zero test")
    return p


def resolve(ns: argparse.Namespace) -> tuple[RunConfig, LinearFractionalMap, LinearFractionalMap | None]:
    phi = parse_map(ns.map)
    psi = parse_map(ns.map2) if ns.map2 else None
    if psi is not None and psi.N != phi.N:
        raise UsageError("maps act on balls of different dimension")
    if ns.N is not None and ns.N != phi.N:
        raise UsageError(f"--N {ns.N} does not match the map (N={phi.N})")
    theorem = getattr(ns, "theorem", None)
    space = ns.space or ("dirichlet" if theorem and theorem.startswith("4") or ns.command == "dirichlet-report"
                         else "hardy")
    if ns.command == "dirichlet-report" and space != "dirichlet":
        raise UsageError("dirichlet-report runs on the Dirichlet space")
    if ns.s <= -1:
        raise UsageError("--s must exceed -1")
    if ns.D < 1 or ns.samples is not None and ns.samples < 1:
        raise UsageError("--D and --samples must be positive")
    if not 1 <= ns.rmax_exp <= 26:
        raise UsageError("--rmax-exp must lie in [1, 26]")
    samples = ns.samples if ns.samples is not None else (1000 if ns.command == "adjoint-check" else 16)
    cfg = RunConfig(
        command=ns.command, space=space, N=phi.N, s=ns.s if space == "bergman" else 0.0,
        map=ns.map, map2=ns.map2, D=ns.D, rmax_exp=ns.rmax_exp, samples=samples, seed=ns.seed,
        out=ns.out, csv=ns.csv, zeta1=getattr(ns, "zeta1", None), zeta2=getattr(ns, "zeta2", None),
        lemma34=getattr(ns, "lemma34", False), lemma36=getattr(ns, "lemma36", False),
        lemma37=getattr(ns, "lemma37", False), theorem=theorem,
    )
    return cfg, phi, psi


def main(argv: list[str] | None = None) -> int:
    from ballop.commutator import HypothesisError

    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        cfg, phi, psi = resolve(ns)
        code, body = COMMANDS[cfg.command](cfg, phi, psi)
    except UsageError as exc:
        print(f"ballop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"ballop: hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    report = {
        "version": __version__,
        "config": asdict(cfg),
        "maps": {"phi": map_to_dict(phi), "psi": None if psi is None else map_to_dict(psi)},
        "exit_code": code,
        **body,
    }
    text = dumps(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

"""Boundary limits, kernel scores and compactness verdicts for [C_psi^*, C_phi]."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from ballop import sequences as sq
from ballop.dirichletops import commutator_zero_test, log_index_floor
from ballop.extrapolation import LimitScan, radial_grid, scan_limit
from ballop.lft import (
    LinearFractionalMap,
    angular_derivative,
    as_boundary_point,
    boundary_image,
    commutes,
    compose,
    disk_coefficients,
    disk_fixed_points,
    krein_adjoint,
    random_unitary,
)
from ballop.opalg import InexactMatrixError, commutator_matrix, composition_block, singular_floor
from ballop.spaces import SpaceSpec, backward_cross_inner, coefficient_vector_of_kernel, kernel_eval

SCORE_EPS = 1e-4
AGREEMENT_FLOOR = 1e-5
IMAGE_TOL = 1e-8
ORIGIN_TOL = 1e-10
SUP_ONE_TOL = 1e-8
R_MAX_EXP = 20
R_CAP_EXP = 26
FLOOR_ZERO = 1e-8


class HypothesisError(ValueError):
    """A precondition of the limit formula or a verdict does not hold."""


def _check_power_space(space: SpaceSpec):
    if space.kind == "dirichlet":
        raise ValueError("kernel scans use the Hardy/Bergman kernels")


# -- boundary limit scan ---------------------------------------------------------


def lemma32_scan(space: SpaceSpec, phi: LinearFractionalMap, psi: LinearFractionalMap, zeta1, zeta2,
                 kmin: int = 4, kmax: int = R_MAX_EXP) -> LimitScan:
    """<C_psi^* k_{r zeta2}, C_phi^* k_{r zeta1}> as r -> 1 against (2/(d_phi(zeta1) + d_psi(zeta2)))^t."""
    _check_power_space(space)
    if kmax > R_CAP_EXP:
        raise ValueError(f"r grid capped at 1 - 2^-{R_CAP_EXP}")
    z1, z2 = as_boundary_point(zeta1), as_boundary_point(zeta2)
    i1, i2 = boundary_image(phi, z1), boundary_image(psi, z2)
    if not (i1.on_sphere and i2.on_sphere):
        raise HypothesisError("boundary image lies inside the ball")
    if np.linalg.norm(i1.point - i2.point) > IMAGE_TOL:
        raise HypothesisError(f"phi(zeta1) != psi(zeta2): {i1.point} vs {i2.point}")
    d1, d2 = angular_derivative(phi, z1), angular_derivative(psi, z2)
    if not (math.isfinite(d1) and math.isfinite(d2)):
        raise HypothesisError("no finite angular derivative at the given boundary point")
    predicted = (2.0 / (d1 + d2)) ** space.t
    rs = radial_grid(kmin, kmax)
    vals = [backward_cross_inner(space, phi, psi, r * z2, r * z1) for r in rs]
    scan = scan_limit(rs, vals, power=1.0)
    scan.predicted = complex(predicted)
    scan.agreement = bool(abs(scan.limit - predicted) <= max(AGREEMENT_FLOOR, scan.error))
    return scan


# -- forward cross inner product -----------------------------------------------


def _unitary_part(phi: LinearFractionalMap):
    return phi.A / phi.d if phi.is_unitary() else None


def _norm_factor(t: float, x: np.ndarray) -> float:
    return (1.0 - min(float(np.vdot(x, x).real), 1.0 - 1e-16)) ** (t / 2)


def _forward_unitary(space, phi, psi, a, b) -> complex | None:
    t = space.t
    U = _unitary_part(psi)
    if U is not None:
        c = U.conj().T @ b  # C_psi k_b = k_{U^* b}
        return complex(kernel_eval(space, a, phi(c)) * _norm_factor(t, a) * _norm_factor(t, c))
    V = _unitary_part(phi)
    if V is not None:
        c = V.conj().T @ a
        return complex(np.conj(kernel_eval(space, b, psi(c))) * _norm_factor(t, b) * _norm_factor(t, c))
    return None


def _disk_terms(phi: LinearFractionalMap, a: complex, t: int):
    """K_a o phi as (polynomial coefficients, [(coef, lam, j)]) with terms coef (1 - lam z)^-j."""
    al, be, ga, de = (mpmath.mpc(x) for x in disk_coefficients(phi))
    ab = mpmath.conj(mpmath.mpc(a))
    q0, q1 = de - ab * be, ga - ab * al
    if abs(q1) < mpmath.mpf(10) ** -30:
        # K_a o phi = ((de + ga z)/q0)^t, a polynomial
        poly = [mpmath.binomial(t, m) * (de / q0) ** (t - m) * (ga / q0) ** m for m in range(t + 1)]
        return poly, []
    lam = -q1 / q0
    A0 = ga / q1
    B0 = (de - ga * q0 / q1) / q0
    terms = [(mpmath.binomial(t, j) * A0 ** (t - j) * B0**j, lam, j) for j in range(t + 1)]
    return [], terms


def _pair(t, x, y) -> mpmath.mpc:
    """<(1 - lx z)^-i, (1 - ly z)^-j> in the one-variable space with exponent t."""
    (ci, li, i), (cj, lj, j) = x, y
    if i == 0 or j == 0:
        return ci * mpmath.conj(cj)
    return ci * mpmath.conj(cj) * mpmath.hyp2f1(i, j, t, li * mpmath.conj(lj))


def _poly_pair(t, poly, y) -> mpmath.mpc:
    """<sum p_m z^m, c (1 - l z)^-j>."""
    cj, lj, j = y
    s = mpmath.mpc(0)
    for m, p in enumerate(poly):
        wm = mpmath.factorial(m) / mpmath.rf(t, m)
        s += p * mpmath.conj(cj * mpmath.rf(j, m) / mpmath.factorial(m) * lj**m) * wm
    return s


def _forward_disk_hypergeometric(t: int, phi, psi, a: complex, b: complex) -> complex:
    with mpmath.workdps(40):
        pa, ta = _disk_terms(phi, a, t)
        pb, tb = _disk_terms(psi, b, t)
        total = mpmath.mpc(0)
        for x in ta:
            for y in tb:
                total += _pair(t, x, y)
        for y in tb:
            total += _poly_pair(t, pa, y) if pa else 0
        for x in ta:
            total += mpmath.conj(_poly_pair(t, pb, x)) if pb else 0
        if pa and pb:
            for m in range(min(len(pa), len(pb))):
                total += pa[m] * mpmath.conj(pb[m]) * mpmath.factorial(m) / mpmath.rf(t, m)
        na = (1 - abs(mpmath.mpc(a)) ** 2) ** (mpmath.mpf(t) / 2)
        nb = (1 - abs(mpmath.mpc(b)) ** 2) ** (mpmath.mpf(t) / 2)
        return complex(total * na * nb)


def _forward_disk_sequence(t: float, phi, psi, a: complex, b: complex) -> complex:
    r = max(abs(a), abs(b), 0.5)
    # the composed kernels decay no faster than the kernels themselves
    lam = []
    for m, w in ((phi, a), (psi, b)):
        al, be, ga, de = disk_coefficients(m)
        q0, q1 = de - np.conj(w) * be, ga - np.conj(w) * al
        lam.append(abs(q1 / q0))
    L = sq.length_for(max(r, *lam), t)
    wts = sq.slice_weights(t, L)
    fa = sq.kernel_after_disk_map(a, t, *disk_coefficients(phi), L) * (1 - abs(a) ** 2) ** (t / 2)
    fb = sq.kernel_after_disk_map(b, t, *disk_coefficients(psi), L) * (1 - abs(b) ** 2) ** (t / 2)
    return sq.inner(fa, fb, wts)


def _forward_graded(space, phi, psi, a, b, tol: float = 1e-12, D0: int = 16, Dmax: int = 96) -> complex:
    prev = None
    D = D0
    while D <= Dmax:
        ka = coefficient_vector_of_kernel(space, a, D).values
        kb = coefficient_vector_of_kernel(space, b, D).values
        Fa = composition_block(space, phi, D, D) @ ka
        Fb = composition_block(space, psi, D, D) @ kb
        val = complex(np.vdot(Fb, Fa)) * _norm_factor(space.t, a) * _norm_factor(space.t, b)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        D += 8
    raise InexactMatrixError("forward_cross_inner: graded route did not settle",
                             {"operator": "forward_cross_inner", "D": Dmax, "tol": tol})


def forward_cross_inner(space: SpaceSpec, phi: LinearFractionalMap, psi: LinearFractionalMap, a, b,
                        route: str = "auto") -> complex:
    """<C_phi k_a, C_psi k_b>.

    Routes: closed form when either map is unitary; one-variable
    hypergeometric sums (integer t) or long coefficient sequences on the disk;
    graded matrices with degree escalation on the ball.
    """
    _check_power_space(space)
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    t = space.t
    if route in ("auto", "unitary"):
        val = _forward_unitary(space, phi, psi, a, b)
        if val is not None:
            return val
        if route == "unitary":
            raise ValueError("neither map is unitary")
    if space.N == 1 and route in ("auto", "hypergeometric") and float(t).is_integer():
        return _forward_disk_hypergeometric(int(t), phi, psi, complex(a[0]), complex(b[0]))
    if space.N == 1 and route in ("auto", "sequence"):
        return _forward_disk_sequence(t, phi, psi, complex(a[0]), complex(b[0]))
    return _forward_graded(space, phi, psi, a, b)


def forward_cross_inner_quadrature(space: SpaceSpec, phi, psi, a: complex, b: complex, nodes: int = 1 << 13,
                                   radial: int = 64) -> complex:
    """Disk oracle: boundary trapezoid (Hardy) or Gauss-Jacobi x trapezoid (Bergman)."""
    if space.N != 1:
        raise ValueError("quadrature oracle is for the disk")
    from scipy.special import roots_jacobi

    t = space.t
    th = 2 * np.pi * np.arange(nodes) / nodes

    def fk(m, w, z):
        al, be, ga, de = disk_coefficients(m)
        x = (al * z + be) / (ga * z + de)
        return (1 - np.conj(w) * x) ** (-t) * (1 - abs(w) ** 2) ** (t / 2)

    if space.kind == "hardy":
        z = np.exp(1j * th)
        return complex(np.mean(fk(phi, a, z) * np.conj(fk(psi, b, z))))
    # dA_s = (s+1)(1-|z|^2)^s dA/pi; with u = rho^2 the radial weight is (s+1)(1-u)^s du / 2 on [0,1]
    s = space.s
    x, w = roots_jacobi(radial, s, 0.0)  # weight (1-x)^s on [-1,1]
    u = (x + 1) / 2
    wu = w / 2 ** (s + 1)  # weight (1-u)^s du
    total = 0j
    for uk, wk in zip(u, wu):
        z = np.sqrt(uk) * np.exp(1j * th)
        total += wk * np.mean(fk(phi, a, z) * np.conj(fk(psi, b, z)))
    return complex((s + 1) * total)


# -- kernel score ----------------------------------------------------------------


def boundary_directions(N: int, m: int, seed: int = 0) -> list[np.ndarray]:
    """Seeded random unitary orbit of e_1."""
    rng = np.random.default_rng(seed)
    return [random_unitary(rng, N)[:, 0] for _ in range(m)]


@dataclass
class KernelScore:
    score: float
    per_direction: list
    floors: list  # (D, singular floor of the commutator matrix)
    r_max: float
    derivative_products: list = field(default_factory=list)


def _score_direction(space, phi, psi, omega, kmin, kmax):
    inv_phi, inv_psi = phi.inverse(), psi.inverse()
    z1 = inv_phi(omega)
    z2 = inv_psi(omega)
    z1, z2 = z1 / np.linalg.norm(z1), z2 / np.linalg.norm(z2)
    rs = radial_grid(kmin, kmax)
    vals = [forward_cross_inner(space, phi, psi, r * z2, r * z1) - backward_cross_inner(space, phi, psi, r * z2, r * z1)
            for r in rs]
    scan = scan_limit(rs, vals, power=1.0)
    return scan, z1, z2


def commutator_kernel_score(space: SpaceSpec, phi: LinearFractionalMap, psi: LinearFractionalMap, m: int = 16,
                            D: int = 8, kmin: int = 4, kmax: int = R_MAX_EXP, seed: int = 0,
                            floors: bool = True) -> KernelScore:
    """Max over m boundary directions of lim |<[C_psi^*, C_phi] k_{r zeta2}, k_{r zeta1}>|.

    zeta1 = phi^-1(omega), zeta2 = psi^-1(omega).  The tail singular floor of
    the commutator matrix at degrees D and D + 4 is attached as secondary evidence.
    """
    _check_power_space(space)
    for f in (phi, psi):
        if not f.is_automorphism():
            raise ValueError("kernel score expects automorphisms")
    if kmax > R_CAP_EXP:
        raise ValueError(f"r grid capped at 1 - 2^-{R_CAP_EXP}")
    per = []
    prods = []
    for omega in boundary_directions(space.N, m, seed):
        scan, z1, z2 = _score_direction(space, phi, psi, omega, kmin, kmax)
        per.append(abs(scan.limit))
        if space.N == 1:
            prods.append(angular_derivative(psi.inverse(), z1) * angular_derivative(psi, z2))
    fl = []
    if floors:
        for k in (D, D + 4):
            try:
                fl.append((k, singular_floor(commutator_matrix(space, phi, psi, k))))
            except InexactMatrixError:
                fl.append((k, math.nan))  # truncated products never settled; secondary evidence only
    return KernelScore(float(max(per)), per, fl, 1.0 - 2.0**-kmax, prods)


# -- verdicts ----------------------------------------------------------------------


@dataclass
class CommutatorVerdict:
    theorem: str
    space: dict
    predicate: bool | str
    compact: bool | None
    score: float | None = None
    floor: list | None = None
    status: str = "coherent"  # or "inconclusive"
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "space": self.space,
            "predicate": self.predicate,
            "compact": self.compact,
            "score": self.score,
            "floor": [[int(d), float(v)] for d, v in (self.floor or [])],
            "status": self.status,
            "details": self.details,
        }


def _is_origin_fixed(f: LinearFractionalMap) -> bool:
    return float(np.linalg.norm(f(np.zeros(f.N)))) < ORIGIN_TOL


def theorem31_verdict(phi: LinearFractionalMap, psi: LinearFractionalMap, space: SpaceSpec, m: int = 16,
                      D: int = 8, kmax: int = R_MAX_EXP, seed: int = 0) -> CommutatorVerdict:
    """Compact iff the automorphisms commute and both fix the origin."""
    _check_power_space(space)
    for f in (phi, psi):
        if not f.is_automorphism():
            raise HypothesisError("expected automorphisms of the ball")
        if f.is_identity():
            raise HypothesisError("neither map may be the identity")
    predicate = bool(commutes(phi, psi) and _is_origin_fixed(phi) and _is_origin_fixed(psi))
    ks = commutator_kernel_score(space, phi, psi, m=m, D=D, kmax=kmax, seed=seed)
    evidence = ks.score < SCORE_EPS
    return CommutatorVerdict(
        "3.1", space.to_dict(), predicate, predicate, ks.score, ks.floors,
        "coherent" if evidence == predicate else "inconclusive",
        {"commute": bool(commutes(phi, psi)), "r_max": ks.r_max, "m": m, "D": D,
         "per_direction": ks.per_direction, "derivative_products": ks.derivative_products},
    )


def _dirichlet_evidence(fl) -> bool | None:
    """True (compact), False (non-compact) or None from log-index singular values across D."""
    first, last = fl[0][1], fl[-1][1]
    if last < FLOOR_ZERO or (first > 0 and last / first < 0.2):
        return True
    if last >= first and last > 1e-3:
        return False
    return None


def _dirichlet_degrees(N: int):
    return (16, 32, 64, 128) if N == 1 else (4, 8, 16)


def _status(evidence, claim) -> str:
    return "coherent" if evidence is not None and evidence == claim else "inconclusive"


def theorem42_verdict(phi: LinearFractionalMap, psi: LinearFractionalMap, degrees=None) -> CommutatorVerdict:
    """Dirichlet space: non-trivially compact iff both sup norms are 1 and phi commutes with sigma."""
    space = SpaceSpec.dirichlet(phi.N)
    degrees = degrees or _dirichlet_degrees(phi.N)
    zt = commutator_zero_test(phi, psi)
    sigma = krein_adjoint(psi)
    sups = (phi.sup_norm, psi.sup_norm)
    comm = commutes(phi, sigma)
    predicate = bool(min(sups) >= 1 - SUP_ONE_TOL and comm)
    details = {"zero_test_max_norm": zt.max_norm, "route_gap": zt.route_gap}
    if zt.is_zero:
        # the map-algebra predicate is still reported for the record
        details.update({"sup_norms": list(sups), "phi_sigma_commute": bool(comm), "predicate_formula": predicate})
        return CommutatorVerdict("4.2", space.to_dict(), "trivially compact (zero)", True, zt.max_norm, None,
                                 "coherent", details)
    ps, sp = compose(phi, sigma), compose(sigma, phi)
    prod_sups = (ps.sup_norm, sp.sup_norm)
    # compactness alone: phi o sigma = sigma o phi, or both products compact
    compact = bool(comm or max(prod_sups) < 1 - SUP_ONE_TOL)
    fl = [(d, f) for d, _, f in log_index_floor(phi, psi, degrees)]
    evidence = _dirichlet_evidence(fl)
    details.update({"sup_norms": list(sups), "phi_sigma_commute": bool(comm),
                    "product_sup_norms": list(prod_sups),
                    "products_noncompact": bool(min(prod_sups) >= 1 - SUP_ONE_TOL)})
    return CommutatorVerdict("4.2", space.to_dict(), predicate, compact, None, fl,
                             _status(evidence, compact), details)


def theorem43_verdict(phi: LinearFractionalMap, psi: LinearFractionalMap, degrees=None) -> CommutatorVerdict:
    """Dirichlet space, automorphisms: compact iff they commute."""
    for f in (phi, psi):
        if not f.is_automorphism():
            raise HypothesisError("expected automorphisms of the ball")
    space = SpaceSpec.dirichlet(phi.N)
    degrees = degrees or _dirichlet_degrees(phi.N)
    predicate = bool(commutes(phi, psi))
    floors = log_index_floor(phi, psi, degrees)
    fl = [(d, f) for d, _, f in floors]
    return CommutatorVerdict("4.3", space.to_dict(), predicate, predicate, None, fl,
                             _status(_dirichlet_evidence(fl), predicate),
                             {"singular_index": [k for _, k, _ in floors]})


CASE_I_TOL = 1e-8
CASE_II_TOL = 1e-6


def theorem44_classify(phi: LinearFractionalMap, psi: LinearFractionalMap,
                       degrees=(16, 32, 64, 128)) -> CommutatorVerdict:
    """Disk maps, one not an automorphism: shared parabolic point (case-i), paired hyperbolic points (case-ii)."""
    if phi.N != 1 or psi.N != 1:
        raise HypothesisError("classification is for maps of the unit disk")
    if phi.is_automorphism() and psi.is_automorphism():
        raise HypothesisError("both maps are automorphisms; use the automorphism verdict")
    space = SpaceSpec.dirichlet(1)
    fp, fq = disk_fixed_points(phi), disk_fixed_points(psi)
    case = "neither"
    if fp.kind == fq.kind == "parabolic" and abs(fp.points[0] - fq.points[0]) < CASE_I_TOL:
        case = "case-i"
    elif fp.kind == fq.kind == "hyperbolic" and abs(fp.points[0] - fq.points[0]) < CASE_I_TOL:
        a, b = fp.points[1], fq.points[1]
        if _paired(a, b):
            case = "case-ii"
    fl = [(d, f) for d, _, f in log_index_floor(phi, psi, degrees)]
    sups = (phi.sup_norm, psi.sup_norm)
    return CommutatorVerdict("4.4", space.to_dict(), case, None, None, fl, "coherent", {
        "fixed_points": {"phi": [fp.kind, [_cplx(x) for x in fp.points]],
                         "psi": [fq.kind, [_cplx(x) for x in fq.points]]},
        "sup_norms": list(sups),
        "in_regime": bool(min(sups) >= 1 - SUP_ONE_TOL),
    })


def _paired(a: complex, b: complex) -> bool:
    """b = 1/conj(a), allowing either point to sit at infinity."""
    if not math.isfinite(abs(a)):
        return abs(b) < CASE_II_TOL
    if abs(a) < CASE_II_TOL:
        return not math.isfinite(abs(b))
    return math.isfinite(abs(b)) and abs(b - 1 / np.conj(a)) < CASE_II_TOL


def _cplx(x: complex):
    x = complex(x)
    return [x.real if math.isfinite(x.real) else str(x.real), x.imag if math.isfinite(x.imag) else 0.0]

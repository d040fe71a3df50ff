"""Dirichlet-space adjoints and commutators of composition operators.

On D(B_N) the adjoint of C_phi is a rank-two correction of C_sigma,

    C_phi^* f = f(0) K_{phi(0)} + f o sigma - f(sigma(0)),

with sigma the Krein adjoint of phi.  Polynomials composed with a map are
exact through the output degree; K_q o phi is expanded in closed form.  The
compositional cross-check composes truncated series with maps that move the
origin, so it runs at a raised working degree and is then truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ballop import multiindex as mi
from ballop.lft import LinearFractionalMap, compose, krein_adjoint
from ballop.opalg import composition_matrix, singular_floor, singular_values, GradedOperator
from ballop.series import PowerSeries, linear_log
from ballop.spaces import SpaceSpec, kernel_monomial_coeffs

# A polynomial or truncated series regarded as an element of D(B_N).
CoefficientFunction = PowerSeries

ZERO_TEST_DEGREE = 8
ZERO_TEST_TOL = 1e-9
COMPACT_SUP_TOL = 1e-8


def _space(N: int) -> SpaceSpec:
    return SpaceSpec.dirichlet(N)


def dirichlet_inner(f: PowerSeries, g: PowerSeries) -> complex:
    """<f, g> = f(0) conj g(0) + sum |alpha| alpha!/|alpha|! c_alpha conj d_alpha."""
    a, b = f._match(g)
    return complex(np.sum(a.coeffs * np.conj(b.coeffs) * _space(a.N).weights(a.D)))


def dirichlet_norm(f: PowerSeries) -> float:
    return float(np.sqrt(max(dirichlet_inner(f, f).real, 0.0)))


def dirichlet_kernel(w, D: int) -> PowerSeries:
    """K_w = 1 + log 1/(1 - <z, w>) through degree D."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    return PowerSeries(len(w), D, kernel_monomial_coeffs(_space(len(w)), w, D))


def kernel_after_map(q, phi: LinearFractionalMap, D: int) -> PowerSeries:
    """K_q o phi = 1 - log(1 - <phi(z), q>) through degree D, in closed form.

    1 - <phi(z), q> is a quotient of two linear functions of z, so the log
    splits into two linear logs; the constant term is pinned to the principal value.
    """
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    N = phi.N
    cC = np.conj(phi.C)
    num = linear_log(N, D, phi.d - np.vdot(q, phi.B), cC - phi.A.T @ np.conj(q))
    den = linear_log(N, D, phi.d, cC)
    out = 1.0 - (num - den)
    out.coeffs[0] = 1.0 - np.log(complex(1.0 - np.vdot(q, phi(np.zeros(N)))))
    return out


MARGIN_CAP = {1: 120, 2: 56}


def margin_needed(*maps: LinearFractionalMap) -> int:
    """Extra degrees so that composing a truncated series with these maps is exact to ~1e-16."""
    rho = 0.0
    for m in maps:
        rho = max(rho, float(np.linalg.norm(m(np.zeros(m.N)))), float(np.linalg.norm(m.C) / abs(m.d)))
    if rho < 1e-14:
        return 0
    return int(np.ceil(np.log(1e-16) / np.log(min(rho, 0.999))))


def working_margin(*maps: LinearFractionalMap) -> int:
    """margin_needed, capped by MARGIN_CAP to keep the dense power tables affordable."""
    return min(margin_needed(*maps), MARGIN_CAP.get(maps[0].N, 24))


def _at_degree(f: PowerSeries, D: int) -> PowerSeries:
    return f.truncate(D) if f.D >= D else f.pad(D)


def dirichlet_adjoint_apply(phi: LinearFractionalMap, f: PowerSeries, D: int | None = None) -> PowerSeries:
    """C_phi^* f through degree D (f is treated as a polynomial beyond its own degree)."""
    D = f.D if D is None else D
    f = _at_degree(f, D)
    sigma = krein_adjoint(phi)
    zero = np.zeros(phi.N)
    return f(zero) * dirichlet_kernel(phi(zero), D) + f.compose(sigma) - f(sigma(zero))


def compose_apply(phi: LinearFractionalMap, f: PowerSeries, D: int | None = None) -> PowerSeries:
    D = f.D if D is None else D
    return _at_degree(f, D).compose(phi)


def dirichlet_commutator_apply(phi: LinearFractionalMap, psi: LinearFractionalMap, f: PowerSeries,
                               D: int | None = None, flipped_sign: bool = False) -> PowerSeries:
    """[C_psi^*, C_phi] f by the expanded five-term formula.

    (C_sigma C_phi - C_phi C_sigma) f + f(phi(0)) K_{psi(0)} + f(sigma(0))
        - f(phi(sigma(0))) - f(0) K_{psi(0)} o phi

    ``flipped_sign=True`` negates the first bracket, giving the variant with
    C_phi C_sigma - C_sigma C_phi in front; that variant disagrees with the compositional route whenever phi and sigma do not commute.
    """
    D = f.D if D is None else D
    f = _at_degree(f, D)
    sigma = krein_adjoint(psi)
    zero = np.zeros(phi.N)
    s0 = sigma(zero)
    K = dirichlet_kernel(psi(zero), D)
    bracket = f.compose(compose(phi, sigma)) - f.compose(compose(sigma, phi))  # f o phi o sigma - f o sigma o phi
    if flipped_sign:
        bracket = -bracket
    return bracket + f(phi(zero)) * K + f(s0) - f(phi(s0)) - f(zero) * kernel_after_map(psi(zero), phi, D)


def dirichlet_commutator_compositional(phi: LinearFractionalMap, psi: LinearFractionalMap, f: PowerSeries,
                                       D: int | None = None, W: int | None = None) -> PowerSeries:
    """C_psi^*(f o phi) - (C_psi^* f) o phi, computed at working degree W and truncated to D."""
    D = f.D if D is None else D
    W = D + working_margin(phi, krein_adjoint(psi), psi) if W is None else max(W, D)
    f = _at_degree(f, W)
    out = dirichlet_adjoint_apply(psi, f.compose(phi), W) - dirichlet_adjoint_apply(psi, f, W).compose(phi)
    return out.truncate(D)


# -- matrices -----------------------------------------------------------------


def _monomial(N: int, D: int, j: int) -> PowerSeries:
    out = PowerSeries(N, D)
    out.coeffs[j] = 1.0
    return out


def _orthonormal(N: int, D: int, cols: list[PowerSeries]) -> GradedOperator:
    space = _space(N)
    sw = np.sqrt(space.weights(D))
    X = np.stack([c.coeffs for c in cols], axis=1)
    return GradedOperator(space, D, sw[:, None] * X / sw[None, :])


def dirichlet_adjoint_matrix(phi: LinearFractionalMap, D: int) -> GradedOperator:
    """C_phi^* from the explicit formula, orthonormal Dirichlet basis."""
    N = phi.N
    return _orthonormal(N, D, [dirichlet_adjoint_apply(phi, _monomial(N, D, j), D) for j in range(mi.basis_size(N, D))])


def adjoint_route_gap(phi: LinearFractionalMap, D: int) -> float:
    """Max entry gap between the formula adjoint and the conjugate transpose of C_phi."""
    M = composition_matrix(_space(phi.N), phi, D).M
    return float(np.max(np.abs(dirichlet_adjoint_matrix(phi, D).M - M.conj().T)))


def dirichlet_commutator_matrix(phi: LinearFractionalMap, psi: LinearFractionalMap, D: int) -> GradedOperator:
    N = phi.N
    cols = [dirichlet_commutator_apply(phi, psi, _monomial(N, D, j), D) for j in range(mi.basis_size(N, D))]
    return _orthonormal(N, D, cols)


# -- zero test and difference verdict ------------------------------------------


@dataclass
class ZeroTest:
    is_zero: bool
    max_norm: float
    degree: int
    output_degree: int
    route_gap: float  # formula vs compositional


def commutator_zero_test(phi: LinearFractionalMap, psi: LinearFractionalMap, degree: int = ZERO_TEST_DEGREE,
                         output_degree: int | None = None, tol: float = ZERO_TEST_TOL) -> ZeroTest:
    """Apply the commutator to every monomial of degree <= degree and threshold the largest norm."""
    N = phi.N
    Dout = 2 * degree if output_degree is None else output_degree
    worst = 0.0
    gap = 0.0
    for alpha in mi.enumerate_up_to(N, degree):
        f = PowerSeries.monomial(alpha, Dout)
        a = dirichlet_commutator_apply(phi, psi, f, Dout)
        b = dirichlet_commutator_compositional(phi, psi, f, Dout)
        worst = max(worst, dirichlet_norm(a))
        gap = max(gap, dirichlet_norm(a - b))
    return ZeroTest(worst <= tol, worst, degree, Dout, gap)


@dataclass
class DifferenceVerdict:
    verdict: str  # "equal-maps" | "both-compact" | "non-compact-difference"
    sup_norms: tuple
    floors: list  # (D, singular floor of M_phi - M_psi)


def difference_compactness_verdict(phi: LinearFractionalMap, psi: LinearFractionalMap,
                                   degrees=(8, 16, 32)) -> DifferenceVerdict:
    """Compactness of C_phi - C_psi on D(B_N) for linear-fractional self-maps.

    The floors are numerical corroboration only.
    """
    space = _space(phi.N)
    sups = (phi.sup_norm, psi.sup_norm)
    floors = []
    for D in degrees:
        diff = composition_matrix(space, phi, D) - composition_matrix(space, psi, D)
        floors.append((D, singular_floor(diff)))
    if phi.equals(psi):
        verdict = "equal-maps"
    elif max(sups) < 1.0 - COMPACT_SUP_TOL:
        verdict = "both-compact"
    else:
        verdict = "non-compact-difference"
    return DifferenceVerdict(verdict, sups, floors)


def commutator_floor(phi: LinearFractionalMap, psi: LinearFractionalMap, degrees=(8, 16, 32)) -> list:
    """(D, singular floor, top singular value) of the Dirichlet commutator matrix."""
    out = []
    for D in degrees:
        M = dirichlet_commutator_matrix(phi, psi, D)
        out.append((D, singular_floor(M), float(singular_values(M, 1)[0])))
    return out


def log_index_floor(phi: LinearFractionalMap, psi: LinearFractionalMap, degrees=(16, 32, 64, 128)) -> list:
    """(D, k, sigma_k) of the commutator matrix with k = basis_size(N, floor(log2 D)).

    Truncations of a non-compact operator on D(B_N) only expose about log D
    singular values near the essential norm, so the index grows logarithmically.
    """
    out = []
    for D in degrees:
        k = mi.basis_size(phi.N, max(1, int(np.log2(D))))
        out.append((D, k, float(singular_values(dirichlet_commutator_matrix(phi, psi, D), k)[-1])))
    return out

"""Checks of the adjoint identities for composition operators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ballop import multiindex as mi
from ballop import sequences as sq
from ballop.lft import LinearFractionalMap, angular_derivative, disk_coefficients, inner
from ballop.opalg import ESCALATION_STEP, STABILITY_TOL
from ballop.series import PowerSeries, linear_power, map_power_table, multiply_coeffs
from ballop.spaces import SpaceSpec


def _power_kernel_space(space: SpaceSpec):
    if space.kind == "dirichlet":
        raise ValueError("this identity concerns the Hardy and Bergman spaces; see dirichletops")


# -- Krein-adjoint factorization ---------------------------------------------


@dataclass(frozen=True)
class AuxiliaryTriple:
    """g = (<z,-B> + conj d)^-t, h = (<z,C> + d)^t and sigma, for phi scaled so d > 0."""

    space: SpaceSpec
    phi: LinearFractionalMap
    sigma: LinearFractionalMap
    t: float
    g_bounded: bool

    def g(self, z) -> complex:
        return complex((inner(z, -self.phi.B) + np.conj(self.phi.d)) ** (-self.t))

    def h(self, z) -> complex:
        return complex((inner(z, self.phi.C) + self.phi.d) ** self.t)

    def g_series(self, D: int) -> PowerSeries:
        if not self.g_bounded:
            raise ValueError("||B|| >= |d|: g has no convergent expansion on the closed ball")
        return linear_power(self.phi.N, D, np.conj(self.phi.d), -np.conj(self.phi.B), -self.t)

    def h_series(self, D: int) -> PowerSeries:
        return linear_power(self.phi.N, D, self.phi.d, np.conj(self.phi.C), self.t)


def auxiliary_functions(space: SpaceSpec, phi: LinearFractionalMap) -> AuxiliaryTriple:
    _power_kernel_space(space)
    p = phi.with_positive_d()
    return AuxiliaryTriple(space, p, p.krein_adjoint(), space.t, bool(np.linalg.norm(p.B) < abs(p.d)))


def _ext(x) -> np.ndarray:
    return np.asarray(x, dtype=np.clongdouble)


def _identity_residuals(phi: LinearFractionalMap, t: float, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Row-wise residuals for points Z, W of shape (n, N), in extended precision."""
    p = phi.with_positive_d()
    t = np.longdouble(t)
    A, B, C, d = _ext(p.A), _ext(p.B), _ext(p.C), _ext(p.d)
    Z, W = _ext(Z), _ext(W)
    gz = Z @ -B.conj() + np.conj(d)
    sigma_z = (Z @ A.conj() - C) / gz[:, None]  # rows of A^* z - C
    hw = W @ C.conj() + d
    phi_w = (W @ A.T + B) / hw[:, None]
    lhs = gz ** (-t) * np.conj(hw ** t) * (1 - np.sum(sigma_z * W.conj(), axis=1)) ** (-t)
    rhs = (1 - np.sum(Z * phi_w.conj(), axis=1)) ** (-t)
    return np.abs(lhs - rhs).astype(float)


def verify_adjoint_identity(space: SpaceSpec, phi: LinearFractionalMap, z, w, aux: AuxiliaryTriple | None = None) -> float:
    """|g(z) conj(h(w)) K_w(sigma(z)) - K_{phi(w)}(z)|, the identity applied to a kernel.

    Both sides are evaluated in extended precision from the same coefficients,
    so kernels of size (1 - |z||w|)^-t near the sphere do not turn double
    round-off into an apparent failure.
    """
    aux = aux or auxiliary_functions(space, phi)
    Z = np.atleast_1d(np.asarray(z, dtype=complex))[None, :]
    W = np.atleast_1d(np.asarray(w, dtype=complex))[None, :]
    return float(_identity_residuals(phi, aux.t, Z, W)[0])


def adjoint_identity_sweep(space: SpaceSpec, phi: LinearFractionalMap, rng: np.random.Generator,
                           samples: int = 1000) -> float:
    """Max residual over random interior pairs (z, w)."""
    from ballop.lft import random_ball_point

    aux = auxiliary_functions(space, phi)
    pts = [(random_ball_point(rng, space.N), random_ball_point(rng, space.N)) for _ in range(samples)]
    if not pts:
        return 0.0
    Z = np.array([z for z, _ in pts])
    W = np.array([w for _, w in pts])
    return float(np.max(_identity_residuals(phi, aux.t, Z, W)))


# -- one-variable normalization ------------------------------------------------


def normalize_determinant(phi: LinearFractionalMap) -> LinearFractionalMap:
    """Disk map rescaled so that ad - bc = 1 (one of the two square-root choices)."""
    a, b, c, d = disk_coefficients(phi)
    k = np.sqrt(complex(a * d - b * c))
    return LinearFractionalMap(np.array([[a / k]]), np.array([b / k]), np.array([np.conj(c / k)]), d / k)


def verify_lemma34_normalization(phi: LinearFractionalMap, z, t: float = 1.0) -> float:
    """|h(z) conj(g(phi(z))) - |cz + d|^(2t)| for a disk map with ad - bc = 1."""
    a, b, c, d = disk_coefficients(phi)
    if abs(a * d - b * c - 1.0) > 1e-10:
        raise ValueError("expected a disk map normalized to ad - bc = 1")
    z = complex(np.atleast_1d(z)[0])
    w = (a * z + b) / (c * z + d)
    h = (c * z + d) ** t
    g = (-np.conj(b) * w + np.conj(d)) ** (-t)
    return float(abs(h * np.conj(g) - abs(c * z + d) ** (2 * t)))


@dataclass
class InverseDerivative:
    closed_form: float
    angular: float

    @property
    def gap(self) -> float:
        return abs(self.closed_form - self.angular)


def inverse_boundary_derivative(phi: LinearFractionalMap, zeta: complex) -> InverseDerivative:
    """|(phi^-1)'(zeta)| = 1/|a - c zeta|^2 (ad - bc = 1), against the radial quotient of phi^-1."""
    p = normalize_determinant(phi)
    a, b, c, d = disk_coefficients(p)
    closed = 1.0 / abs(a - c * zeta) ** 2
    return InverseDerivative(float(closed), angular_derivative(phi.inverse(), [zeta]))


# -- C_phi^* = T_f C_{phi^-1} ------------------------------------------------


@dataclass
class ResidualReport:
    identity: str
    space: dict
    D: int
    residual: float
    stable: bool
    working_degree: int
    sequence: list = field(default_factory=list)  # (working degree, residual)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "space": self.space,
            "D": self.D,
            "residual": self.residual,
            "stable": self.stable,
            "working_degree": self.working_degree,
            "sequence": [[w, r] for w, r in self.sequence],
        }


def _series_at(u: PowerSeries, D: int) -> PowerSeries:
    return u.truncate(D) if u.D >= D else u.pad(D)


def _mult_cols(N: int, D: int, u: PowerSeries, cols: np.ndarray) -> np.ndarray:
    """u times each monomial-coefficient column, truncated at degree D."""
    n = mi.basis_size(N, D)
    uc = _series_at(u, D).coeffs
    out = np.empty((n, cols.shape[1]), dtype=complex)
    for j in range(cols.shape[1]):
        c = np.zeros(n, dtype=complex)
        m = min(n, cols.shape[0])
        c[:m] = cols[:m, j]
        out[:, j] = multiply_coeffs(N, D, uc, c)
    return out


def _identity_cols(N: int, D: int, cols: int) -> np.ndarray:
    n, m = mi.basis_size(N, D), mi.basis_size(N, cols)
    E = np.zeros((n, m), dtype=complex)
    E[np.arange(m), np.arange(m)] = 1.0
    return E


def _coanalytic_rows(space: SpaceSpec, v: PowerSeries, R: int, W: int) -> np.ndarray:
    """T_{conj v} in monomial coordinates, inputs to degree W, outputs to degree R.

    (T_{conj v} G)_gamma = <G, v z^gamma> / omega_gamma.
    """
    vz = _mult_cols(space.N, W, v, _identity_cols(space.N, W, R))
    ww = space.weights(W)
    return (vz.conj().T * ww[None, :]) / space.weights(R)[:, None]


def _to_orthonormal(space: SpaceSpec, D: int, X: np.ndarray) -> np.ndarray:
    sw = np.sqrt(space.weights(D))
    return sw[:, None] * X / sw[None, :]


def _lemma36_block(space: SpaceSpec, phi: LinearFractionalMap, D: int, W: int) -> np.ndarray:
    N, t = space.N, space.t
    p = phi(np.zeros(N))
    u = linear_power(N, W, 1.0, -np.conj(p), -t)
    uq = _mult_cols(N, W, u, map_power_table(phi.inverse(), W, D))  # u (phi^-1)^beta
    right = (1.0 - float(np.vdot(p, p).real)) ** t * _coanalytic_rows(space, u, D, W) @ uq
    w = space.weights(D)
    left = map_power_table(phi, D).conj().T * w[None, :] / w[:, None]
    return _to_orthonormal(space, D, left - right)


MAX_ROUNDS = 8


def _escalate(identity: str, space: SpaceSpec, D: int, W: int, block, tol: float) -> ResidualReport:
    """Raise the working degree in steps of 4 until the block stops moving (entrywise <= tol)."""
    seq = []
    prev = block(W)
    seq.append((W, float(np.linalg.norm(prev, 2))))
    stable = False
    for _ in range(MAX_ROUNDS):
        W += ESCALATION_STEP
        cur = block(W)
        seq.append((W, float(np.linalg.norm(cur, 2))))
        if float(np.max(np.abs(cur - prev))) <= tol:
            stable = True
            break
        prev = cur
    return ResidualReport(identity, space.to_dict(), D, seq[-1][1], stable, seq[-1][0], seq)


def verify_lemma36(space: SpaceSpec, phi: LinearFractionalMap, D: int, W: int | None = None,
                   tol: float = STABILITY_TOL) -> ResidualReport:
    """||M_phi^* - T_f M_{phi^-1}|| on degrees <= D, f = ((1-|p|^2)/|1-<z,p>|^2)^t, p = phi(0).

    T_f is (1-|p|^2)^t T_{conj u} T_u with u = (1 - <z,p>)^-t.  Sums over
    intermediate degrees run to a working degree W, starting at 2D and raised
    until the block is stable to tol.
    """
    _power_kernel_space(space)
    if not phi.is_automorphism():
        raise ValueError("expected an automorphism of the ball")
    W = 2 * D if W is None else W
    return _escalate("lemma36", space, D, W, lambda k: _lemma36_block(space, phi, D, k), tol)


def lemma36_convergence(space: SpaceSpec, phi: LinearFractionalMap, degrees) -> list[tuple[int, float]]:
    """Residual at working degree 2D for each D (no escalation)."""
    return [(D, float(np.linalg.norm(_lemma36_block(space, phi, D, 2 * D), 2))) for D in degrees]


# -- C_phi T_f = T_{1/K_a} T_{f o phi} T_{K_a} C_phi ----------------------------


def _lemma37_block(space: SpaceSpec, phi: LinearFractionalMap, u: PowerSeries, v: PowerSeries, D: int,
                   W: int) -> np.ndarray:
    N, t = space.N, space.t
    W2 = W + D
    a = phi.inverse()(np.zeros(N))
    # C_phi T_{conj v} (u z^beta)
    tf = _coanalytic_rows(space, v, W, W2) @ _mult_cols(N, W2, u, _identity_cols(N, W2, D))
    left = map_power_table(phi, D, W) @ tf
    # T_{1/K_a} T_{conj(v o phi)} ((u o phi) K_a phi^beta)
    Ka = linear_power(N, W2, 1.0, -np.conj(a), -t)
    uphi = _series_at(u, W2).compose(phi)
    vphi = _series_at(v, W2).compose(phi)
    inner_cols = _mult_cols(N, W2, uphi * Ka, map_power_table(phi, W2, D))
    mid = _coanalytic_rows(space, vphi, D, W2) @ inner_cols
    right = _mult_cols(N, D, linear_power(N, D, 1.0, -np.conj(a), t), mid)
    return _to_orthonormal(space, D, left - right)


def lemma37_residual(space: SpaceSpec, phi: LinearFractionalMap, u: PowerSeries, v: PowerSeries, D: int,
                     W: int | None = None) -> float:
    """Spectral norm of C_phi T_f - T_{1/K_a} T_{f o phi} T_{K_a} C_phi on degrees <= D.

    f = conj(v) u and a = phi^-1(0).
    """
    _power_kernel_space(space)
    if not phi.is_automorphism():
        raise ValueError("expected an automorphism of the ball")
    W = 2 * D if W is None else W
    return float(np.linalg.norm(_lemma37_block(space, phi, u, v, D, W), 2))


def verify_lemma37_factorization(space: SpaceSpec, phi: LinearFractionalMap, u: PowerSeries, v: PowerSeries,
                                 D: int, W: int | None = None, tol: float = STABILITY_TOL) -> ResidualReport:
    """Escalating version of lemma37_residual."""
    _power_kernel_space(space)
    if not phi.is_automorphism():
        raise ValueError("expected an automorphism of the ball")
    W = 2 * D if W is None else W
    return _escalate("lemma37", space, D, W, lambda k: _lemma37_block(space, phi, u, v, D, k), tol)


# -- kernel tests on the z1 slice ---------------------------------------------


def _slice_map(phi: LinearFractionalMap) -> tuple[complex, complex, complex, complex]:
    """(a, b, c, d) of phi on the z1 axis; requires phi to act on z1 alone there."""
    A, B, C = phi.A, phi.B, phi.C
    off = np.concatenate([A[0, 1:], A[1:, 0], B[1:], C[1:]]) if phi.N > 1 else np.zeros(0)
    if off.size and np.max(np.abs(off)) > 1e-14:
        raise ValueError("map does not preserve functions of z1 alone; the slice kernel test does not apply")
    return complex(A[0, 0]), complex(B[0]), complex(np.conj(C[0])), complex(phi.d)


def _slice_coeffs(u: PowerSeries, L: int) -> np.ndarray:
    arr = mi.index_array(u.N, u.D)
    on_axis = np.all(arr[:, 1:] == 0, axis=1)
    if np.max(np.abs(u.coeffs[~on_axis]), initial=0.0) > 0:
        raise ValueError("symbol depends on variables other than z1")
    c = np.zeros(L, dtype=complex)
    k = arr[on_axis, 0]
    keep = k < L
    c[k[keep]] = u.coeffs[on_axis][keep]
    return c


def _disk_compose_short(c: np.ndarray, a, b, cc, d, L: int) -> np.ndarray:
    """Coefficients of sum c_k phi^k for a short polynomial c and disk map phi."""
    inv = sq.linear_power(d, cc, -1.0, L)
    num = np.zeros(L, dtype=complex)
    num[0], num[1] = b, a
    step = sq.multiply(num, inv, L)
    out = np.zeros(L, dtype=complex)
    term = np.zeros(L, dtype=complex)
    term[0] = 1.0
    for k, ck in enumerate(c):
        if k:
            term = sq.multiply(step, term, L)
        if ck != 0:
            out += ck * term
    return out


SYMBOL_LENGTH = 256


def lemma37_kernel_test(space: SpaceSpec, phi: LinearFractionalMap, u: PowerSeries, v: PowerSeries,
                        theta: float = 0.0, kmin: int = 4, kmax: int = 16):
    """||(C_phi T_f - T_{f o phi} C_phi) k_{r zeta}|| for zeta = e^{i theta} e_1, r -> 1.

    Symbols and map must act on z1 alone; the computation then lives on
    one-variable sequences of length ~ 2^kmax.  C_phi T_f is evaluated through
    the exact factorization T_{1/K_a} T_{f o phi} T_{K_a} C_phi, checked
    separately on matrices by verify_lemma37_factorization.
    """
    from ballop.extrapolation import radial_grid, scan_limit

    _power_kernel_space(space)
    t = space.t
    a, b, c, d = _slice_map(phi)
    a0 = complex(phi.inverse()(np.zeros(phi.N))[0])
    Ls = SYMBOL_LENGTH
    uphi = _disk_compose_short(_slice_coeffs(u, u.D + 1), a, b, c, d, Ls)
    vphi = _disk_compose_short(_slice_coeffs(v, v.D + 1), a, b, c, d, Ls)
    rs = radial_grid(kmin, kmax)
    vals = []
    for r in rs:
        L = sq.length_for(r, t)
        w = sq.slice_weights(t, L)
        wpt = r * np.exp(1j * theta)
        ck = sq.kernel_after_disk_map(wpt, t, a, b, c, d, L) * (1.0 - r * r) ** (t / 2)

        def T_fphi(x):
            return sq.coanalytic_toeplitz(vphi, sq.multiply(uphi, x, L), w)

        lam = np.conj(a0)
        lhs = sq.multiply_binomial(T_fphi(sq.multiply_binomial(ck, lam, t)), lam, -t)
        vals.append(sq.norm(lhs - T_fphi(ck), w))
    return scan_limit(rs, vals, power=0.5)


def semicommutator_kernel_test(space: SpaceSpec, b_analytic: np.ndarray, b_coanalytic: np.ndarray,
                               h_analytic: np.ndarray, h_coanalytic: np.ndarray, theta: float = 0.0,
                               kmin: int = 4, kmax: int = 16):
    """||(T_b T_h - T_{bh}) k_{r zeta}|| on the disk for mixed symbols b = conj(bv) bu, h = conj(hv) hu.

    Each symbol is given by short coefficient arrays (analytic part, co-analytic
    part).  T_{bh} is formed as T_{conj(bv hv)} T_{bu hu}.
    """
    from ballop.extrapolation import radial_grid, scan_limit

    if space.N != 1:
        raise ValueError("the semi-multiplication test runs on the disk")
    _power_kernel_space(space)
    t = space.t

    def toeplitz(u, v, x, L, w):
        return sq.coanalytic_toeplitz(np.asarray(v, complex), sq.multiply(np.asarray(u, complex), x, L), w)

    pu = np.convolve(b_analytic, h_analytic)
    pv = np.convolve(b_coanalytic, h_coanalytic)
    rs = radial_grid(kmin, kmax)
    vals = []
    for r in rs:
        L = sq.length_for(r, t)
        w = sq.slice_weights(t, L)
        k = sq.normalized_kernel(r * np.exp(1j * theta), t, L)
        lhs = toeplitz(b_analytic, b_coanalytic, toeplitz(h_analytic, h_coanalytic, k, L, w), L, w)
        vals.append(sq.norm(lhs - toeplitz(pu, pv, k, L, w), w))
    return scan_limit(rs, vals, power=0.5)

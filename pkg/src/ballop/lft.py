"""Linear-fractional self-maps of the unit ball.

A map is stored through its projective matrix

    [[A, B],
     [C*, d]]      phi(z) = (A z + B) / (<z, C> + d),

with <z, C> = sum_j z_j conj(C_j).  Composition is matrix multiplication and
the Krein adjoint is J M* J with J = diag(I, -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import mpmath
import numpy as np
from scipy import optimize

from ballop.extrapolation import richardson

SELF_MAP_TOL = 1e-10
DENOM_TOL = 1e-14


class SingularMapError(ValueError):
    pass


class NotABallMapError(ValueError):
    pass


def _vec(z, N=None) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.ndim != 1 or (N is not None and z.shape[0] != N):
        raise ValueError(f"expected a vector of length {N}, got shape {z.shape}")
    return z


def inner(z, w) -> complex:
    """<z, w> = sum z_j conj(w_j)."""
    return complex(np.vdot(w, z))


@dataclass(frozen=True, eq=False)
class LinearFractionalMap:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    d: complex

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        N = A.shape[0]
        if A.shape != (N, N):
            raise ValueError(f"A must be square, got {A.shape}")
        B = _vec(self.B, N)
        C = _vec(self.C, N)
        d = complex(self.d)
        for name, v in (("A", A), ("B", B), ("C", C)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "d", d)
        if not np.all(np.isfinite(A)) or not np.all(np.isfinite(B)) or not np.all(np.isfinite(C)):
            raise NotABallMapError("non-finite map data")
        if not abs(d) > np.linalg.norm(C) * (1 + 1e-13):
            raise NotABallMapError(
                f"denominator vanishes on the closed ball: |d|={abs(d):.6g} <= ||C||={np.linalg.norm(C):.6g}"
            )

    __hash__ = None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_matrix(cls, M) -> "LinearFractionalMap":
        M = np.asarray(M, dtype=complex)
        N = M.shape[0] - 1
        return cls(M[:N, :N], M[:N, N], np.conj(M[N, :N]), M[N, N])

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @cached_property
    def matrix(self) -> np.ndarray:
        N = self.N
        M = np.empty((N + 1, N + 1), dtype=complex)
        M[:N, :N] = self.A
        M[:N, N] = self.B
        M[N, :N] = np.conj(self.C)
        M[N, N] = self.d
        M.setflags(write=False)
        return M

    def normalized_matrix(self) -> np.ndarray:
        """Unit Frobenius norm, first significant entry real positive."""
        M = self.matrix / np.linalg.norm(self.matrix)
        flat = M.ravel()
        k = int(np.flatnonzero(np.abs(flat) > 1e-9)[0])
        return M * (abs(flat[k]) / flat[k])

    def with_positive_d(self) -> "LinearFractionalMap":
        """Same map rescaled so that d is real and positive."""
        ph = abs(self.d) / self.d
        return LinearFractionalMap(self.A * ph, self.B * ph, self.C * np.conj(ph), abs(self.d))

    def equals(self, other: "LinearFractionalMap", tol: float = 1e-10) -> bool:
        if self.N != other.N:
            return False
        return bool(np.max(np.abs(self.normalized_matrix() - other.normalized_matrix())) <= tol)

    # -- evaluation ---------------------------------------------------------

    def denominator(self, z) -> complex:
        return inner(z, self.C) + self.d

    def __call__(self, z) -> np.ndarray:
        z = _vec(z, self.N)
        if np.linalg.norm(z) > 1 + 1e-12:
            raise ValueError(f"point outside the closed ball: |z|={np.linalg.norm(z)}")
        den = self.denominator(z)
        if abs(den) < DENOM_TOL:
            raise SingularMapError("denominator vanished")
        return (self.A @ z + self.B) / den

    # -- algebra ------------------------------------------------------------

    def __matmul__(self, other: "LinearFractionalMap") -> "LinearFractionalMap":
        return compose(self, other)

    def krein_adjoint(self) -> "LinearFractionalMap":
        return LinearFractionalMap(self.A.conj().T, -self.C, -self.B, np.conj(self.d))

    def inverse(self) -> "LinearFractionalMap":
        return LinearFractionalMap.from_matrix(np.linalg.inv(self.matrix))

    @cached_property
    def sup_norm(self) -> float:
        return sup_norm(self)

    def is_self_map(self) -> bool:
        return self.sup_norm <= 1 + SELF_MAP_TOL

    def is_identity(self, tol: float = 1e-10) -> bool:
        return self.equals(identity_map(self.N), tol)

    def is_automorphism(self, tol: float = 1e-9) -> bool:
        if abs(np.linalg.det(self.matrix)) < 1e-12 * np.linalg.norm(self.matrix) ** (self.N + 1):
            return False
        return compose(self.krein_adjoint(), self).equals(identity_map(self.N), tol)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        """Linear map z -> U z with U unitary (equivalently an automorphism fixing 0)."""
        if np.linalg.norm(self.B) > tol * abs(self.d) or np.linalg.norm(self.C) > tol * abs(self.d):
            return False
        U = self.A / self.d
        return bool(np.max(np.abs(U.conj().T @ U - np.eye(self.N))) < 1e-8)

    def __repr__(self):
        return f"LinearFractionalMap(N={self.N}, matrix={np.round(self.matrix, 6).tolist()})"


# -- constructors -----------------------------------------------------------


def identity_map(N: int) -> LinearFractionalMap:
    return LinearFractionalMap(np.eye(N), np.zeros(N), np.zeros(N), 1.0)


def disk_map(a, b, c, d) -> LinearFractionalMap:
    """phi(z) = (a z + b) / (c z + d) on the unit disk."""
    return LinearFractionalMap([[a]], [b], [np.conj(c)], d)


def diagonal_map(diag) -> LinearFractionalMap:
    diag = np.asarray(diag, dtype=complex)
    N = len(diag)
    return LinearFractionalMap(np.diag(diag), np.zeros(N), np.zeros(N), 1.0)


def unitary_map(U) -> LinearFractionalMap:
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > 1e-10:
        raise ValueError("matrix is not unitary")
    N = U.shape[0]
    return LinearFractionalMap(U, np.zeros(N), np.zeros(N), 1.0)


def ball_automorphism(a) -> LinearFractionalMap:
    """Involutive automorphism exchanging 0 and a."""
    a = _vec(a)
    N = a.shape[0]
    r2 = float(np.vdot(a, a).real)
    if r2 >= 1.0:
        raise ValueError(f"|a| must be < 1, got {math.sqrt(r2)}")
    if r2 == 0.0:
        return LinearFractionalMap(-np.eye(N), np.zeros(N), np.zeros(N), 1.0)
    P = np.outer(a, a.conj()) / r2
    s = math.sqrt(1.0 - r2)
    A = -(P + s * (np.eye(N) - P))
    return LinearFractionalMap(A, a, -a, 1.0)


def compose(phi: LinearFractionalMap, rho: LinearFractionalMap) -> LinearFractionalMap:
    """phi o rho."""
    if phi.N != rho.N:
        raise ValueError("dimension mismatch")
    M = phi.matrix @ rho.matrix
    M = M / np.linalg.norm(M)
    try:
        return LinearFractionalMap.from_matrix(M)
    except NotABallMapError as exc:
        raise NotABallMapError(f"composition is not a ball map: {exc}") from None


def krein_adjoint(phi: LinearFractionalMap) -> LinearFractionalMap:
    return phi.krein_adjoint()


def evaluate(phi: LinearFractionalMap, z) -> np.ndarray:
    return phi(z)


def commutes(phi: LinearFractionalMap, psi: LinearFractionalMap, tol: float = 1e-10) -> bool:
    return compose(phi, psi).equals(compose(psi, phi), tol)


def as_boundary_point(zeta) -> np.ndarray:
    zeta = _vec(zeta)
    if abs(np.linalg.norm(zeta) - 1.0) > 1e-12:
        raise ValueError(f"boundary point must have unit norm, got {np.linalg.norm(zeta)}")
    return zeta


def random_unitary(rng: np.random.Generator, N: int) -> np.ndarray:
    Z = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_ball_point(rng: np.random.Generator, N: int, radius: float = 1.0) -> np.ndarray:
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    v /= np.linalg.norm(v)
    return v * radius * rng.uniform() ** (1.0 / (2 * N))


def random_sphere_point(rng: np.random.Generator, N: int) -> np.ndarray:
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    return v / np.linalg.norm(v)


def random_automorphism(rng: np.random.Generator, N: int, radius: float = 0.8) -> LinearFractionalMap:
    a = random_ball_point(rng, N, radius)
    return compose(unitary_map(random_unitary(rng, N)), ball_automorphism(a))


def random_self_map(rng: np.random.Generator, N: int) -> LinearFractionalMap:
    """A random linear-fractional self-map; alternates generic and automorphic families."""
    if rng.uniform() < 0.5:
        A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        B = rng.normal(size=N) + 1j * rng.normal(size=N)
        d = complex(rng.normal(), rng.normal())
        C = rng.normal(size=N) + 1j * rng.normal(size=N)
        C *= rng.uniform(0.0, 0.8) * abs(d) / np.linalg.norm(C)
        raw = LinearFractionalMap(A, B, C, d)
        scale = rng.uniform(0.5, 0.99) / sup_norm(raw)
        return LinearFractionalMap(A * scale, B * scale, C, d)
    contraction = LinearFractionalMap(
        rng.uniform(0.5, 1.0) * random_unitary(rng, N), np.zeros(N), np.zeros(N), 1.0
    )
    left = ball_automorphism(random_ball_point(rng, N, 0.7))
    right = ball_automorphism(random_ball_point(rng, N, 0.7))
    return compose(left, compose(contraction, right))


# -- analysis on the sphere ------------------------------------------------


def sup_norm(phi: LinearFractionalMap) -> float:
    """sup over the closed ball of |phi|, attained on the sphere."""
    N = phi.N
    if N == 1:
        a, b, c, d = phi.A[0, 0], phi.B[0], np.conj(phi.C[0]), phi.d

        def f(th):
            z = np.exp(1j * th)
            return np.abs((a * z + b) / (c * z + d))

        th = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
        vals = f(th)
        h = th[1] - th[0]
        best = float(vals.max())
        for i in np.argsort(vals)[-3:]:
            res = optimize.minimize_scalar(
                lambda x: -f(x), bounds=(th[i] - h, th[i] + h), method="bounded",
                options={"xatol": 1e-12},
            )
            best = max(best, float(-res.fun))
        return best

    rng = np.random.default_rng(0)
    X = rng.normal(size=(2048 * N, 2 * N))
    X = np.vstack([X, np.eye(2 * N), -np.eye(2 * N)])
    Z = (X[:, :N] + 1j * X[:, N:]) / np.linalg.norm(X, axis=1)[:, None]
    num = Z @ phi.A.T + phi.B
    den = Z @ phi.C.conj() + phi.d
    vals = np.linalg.norm(num, axis=1) / np.abs(den)
    best = float(vals.max())

    def neg(x):
        n = np.linalg.norm(x)
        z = (x[:N] + 1j * x[N:]) / n
        return -float(np.linalg.norm(phi.A @ z + phi.B) / abs(inner(z, phi.C) + phi.d))

    for i in np.argsort(vals)[-6:]:
        res = optimize.minimize(neg, X[i] / np.linalg.norm(X[i]), method="BFGS", options={"gtol": 1e-12})
        best = max(best, -float(res.fun))
    return best


class BoundaryImage(NamedTuple):
    point: np.ndarray
    on_sphere: bool


def boundary_image(phi: LinearFractionalMap, zeta) -> BoundaryImage:
    """Radial limit of phi at zeta; linear-fractional maps extend to the closed ball."""
    zeta = as_boundary_point(zeta)
    w = phi(zeta)
    return BoundaryImage(w, bool(abs(np.linalg.norm(w) - 1.0) <= 1e-10))


@dataclass
class AngularDerivative:
    value: float
    grid_min: float
    error: float
    converged: bool

    @property
    def disagreement(self) -> float:
        return abs(self.value - self.grid_min) if math.isfinite(self.value) else math.inf


DIVERGENCE_BOUND = 1e8


def angular_derivative_report(phi: LinearFractionalMap, zeta, kmin: int = 4, kmax: int = 40) -> AngularDerivative:
    """Radial quotient (1-|phi(r zeta)|)/(1-r) on r = 1 - 2^-k, extrapolated to r = 1.

    The quotients are evaluated in 60-digit arithmetic so the deep end of the
    grid is not swamped by cancellation.
    """
    zeta = as_boundary_point(zeta)
    with mpmath.workdps(60):
        A = [[mpmath.mpc(x) for x in row] for row in phi.A]
        B = [mpmath.mpc(x) for x in phi.B]
        Cc = [mpmath.conj(mpmath.mpc(x)) for x in phi.C]
        d = mpmath.mpc(phi.d)
        zt = [mpmath.mpc(x) for x in zeta]
        nz = mpmath.sqrt(sum(abs(x) ** 2 for x in zt))
        zt = [x / nz for x in zt]  # unit length to working precision, not just to double
        N = phi.N

        def image_norm(r):
            z = [r * x for x in zt]
            den = sum(z[j] * Cc[j] for j in range(N)) + d
            w = [(sum(A[i][j] * z[j] for j in range(N)) + B[i]) / den for i in range(N)]
            return mpmath.sqrt(sum(abs(x) ** 2 for x in w))

        # rounded coefficients leave |phi(zeta)| a few ulps off 1; measure against it, not against 1
        top = image_norm(1)
        if abs(1 - top) > 1e-10:
            return AngularDerivative(math.inf, float((1 - image_norm(1 - mpmath.mpf(2) ** -kmax)) * 2**kmax),
                                     math.inf, False)
        qs = []
        for k in range(kmin, kmax + 1):
            h = mpmath.mpf(2) ** (-k)
            qs.append((top - image_norm(1 - h)) / h)
        if max(qs) > DIVERGENCE_BOUND:
            return AngularDerivative(math.inf, float(min(qs)), math.inf, False)
        # h halves along the grid, so values are ordered by decreasing h
        ext = richardson(qs, ratio=2.0, power=1.0, max_cols=8)
        value = float(ext.value)
        tail_min = float(min(qs[-5:]))
        converged = ext.error < 1e-8
    if not converged:
        return AngularDerivative(math.inf, tail_min, ext.error, False)
    return AngularDerivative(value, tail_min, ext.error, True)


def angular_derivative(phi: LinearFractionalMap, zeta) -> float:
    """d_phi(zeta) along the radius; math.inf when no finite angular derivative exists."""
    return angular_derivative_report(phi, zeta).value


# -- one-variable fixed points ---------------------------------------------


@dataclass(frozen=True)
class DiskFixedPointClass:
    kind: str  # "parabolic" | "hyperbolic" | "interior-only"
    points: tuple

    @property
    def boundary_point(self):
        return self.points[0] if self.kind in ("parabolic", "hyperbolic") else None


FIXED_POINT_TOL = 1e-7


def disk_coefficients(phi: LinearFractionalMap) -> tuple[complex, complex, complex, complex]:
    if phi.N != 1:
        raise ValueError("expected a map of the unit disk (N = 1)")
    return complex(phi.A[0, 0]), complex(phi.B[0]), complex(np.conj(phi.C[0])), complex(phi.d)


def disk_fixed_points(phi: LinearFractionalMap) -> DiskFixedPointClass:
    """Fixed points of (az+b)/(cz+d) from c z^2 + (d - a) z - b = 0."""
    if phi.is_identity():
        raise ValueError("the identity map has no isolated fixed points")
    a, b, c, d = disk_coefficients(phi)
    scale = np.linalg.norm(phi.matrix)
    a, b, c, d = a / scale, b / scale, c / scale, d / scale
    inf = complex(math.inf, 0.0)
    if abs(c) < 1e-14:
        roots = [inf, inf] if abs(d - a) < 1e-14 else [b / (d - a), inf]
    else:
        disc = np.sqrt(complex((d - a) ** 2 + 4 * b * c))
        roots = [(-(d - a) + disc) / (2 * c), (-(d - a) - disc) / (2 * c)]
    on = [math.isfinite(abs(r)) and abs(abs(r) - 1.0) < FIXED_POINT_TOL for r in roots]
    if all(on) and abs(roots[0] - roots[1]) < FIXED_POINT_TOL:
        return DiskFixedPointClass("parabolic", ((roots[0] + roots[1]) / 2,))
    if any(on):
        if all(on):
            # attracting boundary point first
            det = a * d - b * c
            roots.sort(key=lambda r: abs(det / (c * r + d) ** 2))
        elif not on[0]:
            roots.reverse()
        return DiskFixedPointClass("hyperbolic", tuple(roots))
    return DiskFixedPointClass("interior-only", tuple(r for r in roots))

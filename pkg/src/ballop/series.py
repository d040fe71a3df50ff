"""Truncated multivariate power series on the graded monomial basis."""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from ballop import multiindex as mi


class PowerSeries:
    """Coefficients c_alpha of sum c_alpha z^alpha for |alpha| <= D.

    Coefficients are stored in graded-lex order (see ``multiindex``).  All
    arithmetic is closed under truncation: products drop only terms of
    order > D.
    """

    def __init__(self, N: int, D: int, coeffs=None):
        self.N = int(N)
        self.D = int(D)
        n = mi.basis_size(self.N, self.D)
        if coeffs is None:
            self.coeffs = np.zeros(n, dtype=complex)
        else:
            c = np.asarray(coeffs, dtype=complex)
            if c.shape != (n,):
                raise ValueError(f"expected {n} coefficients for N={N}, D={D}, got {c.shape}")
            self.coeffs = c.copy()

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, N: int, D: int, c: complex = 1.0) -> "PowerSeries":
        out = cls(N, D)
        out.coeffs[0] = c
        return out

    @classmethod
    def linear(cls, N: int, D: int, c0: complex, grad) -> "PowerSeries":
        """c0 + sum_j grad_j z_j."""
        out = cls.constant(N, D, c0)
        if D >= 1:
            out.coeffs[1 : N + 1] = np.asarray(grad, dtype=complex)
        return out

    @classmethod
    def monomial(cls, alpha, D: int, c: complex = 1.0) -> "PowerSeries":
        alpha = mi.MultiIndex(alpha)
        out = cls(alpha.N, D)
        if alpha.order <= D:
            out.coeffs[mi.position(alpha, D)] = c
        return out

    @classmethod
    def from_dict(cls, N: int, D: int, terms: dict) -> "PowerSeries":
        out = cls(N, D)
        for alpha, c in terms.items():
            alpha = mi.MultiIndex(alpha)
            if alpha.order <= D:
                out.coeffs[mi.position(alpha, D)] += c
        return out

    # -- shape --------------------------------------------------------------

    def truncate(self, D: int) -> "PowerSeries":
        if D > self.D:
            raise ValueError(f"cannot truncate degree {self.D} series to higher degree {D}")
        return PowerSeries(self.N, D, self.coeffs[: mi.basis_size(self.N, D)])

    def pad(self, D: int) -> "PowerSeries":
        """Zero-extend to a higher truncation order (exact for polynomials)."""
        out = PowerSeries(self.N, D)
        m = min(len(self.coeffs), len(out.coeffs))
        out.coeffs[:m] = self.coeffs[:m]
        return out

    def copy(self) -> "PowerSeries":
        return PowerSeries(self.N, self.D, self.coeffs)

    def degree(self, tol: float = 0.0) -> int:
        nz = np.flatnonzero(np.abs(self.coeffs) > tol)
        return int(mi.orders(self.N, self.D)[nz[-1]]) if len(nz) else 0

    def _match(self, other: "PowerSeries") -> tuple["PowerSeries", "PowerSeries"]:
        if self.N != other.N:
            raise ValueError("dimension mismatch")
        D = min(self.D, other.D)
        a = self if self.D == D else self.truncate(D)
        b = other if other.D == D else other.truncate(D)
        return a, b

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            a, b = self._match(other)
            return PowerSeries(a.N, a.D, a.coeffs + b.coeffs)
        out = self.copy()
        out.coeffs[0] += other
        return out

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(self.N, self.D, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            a, b = self._match(other)
            return PowerSeries(a.N, a.D, multiply_coeffs(a.N, a.D, a.coeffs, b.coeffs))
        return PowerSeries(self.N, self.D, self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return self * other.power(-1)
        return PowerSeries(self.N, self.D, self.coeffs / other)

    def power(self, m) -> "PowerSeries":
        """self**m; generalized binomial series for non-integer or negative m."""
        if float(m).is_integer() and m >= 0:
            out = PowerSeries.constant(self.N, self.D, 1.0)
            base = self
            k = int(m)
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term has no such power")
        u = self * (1.0 / c0)
        u.coeffs[0] = 0.0
        out = PowerSeries.constant(self.N, self.D, 1.0)
        term = PowerSeries.constant(self.N, self.D, 1.0)
        binom = 1.0
        for k in range(1, self.D + 1):
            binom = binom * (m - k + 1) / k
            term = term * u
            out = out + term * binom
        return out * principal_power(c0, m)

    def log(self) -> "PowerSeries":
        """Principal log(c0) plus the series of log(1 + u)."""
        c0 = self.coeffs[0]
        u = self * (1.0 / c0)
        u.coeffs[0] = 0.0
        out = PowerSeries.constant(self.N, self.D, np.log(complex(c0)))
        term = PowerSeries.constant(self.N, self.D, 1.0)
        for k in range(1, self.D + 1):
            term = term * u
            out = out + term * ((-1.0) ** (k + 1) / k)
        return out

    def compose(self, phi) -> "PowerSeries":
        """self o phi, exact through order D."""
        nz = np.flatnonzero(self.coeffs)
        top = int(mi.orders(self.N, self.D)[nz[-1]]) if nz.size else 0
        P = map_power_table(phi, self.D, top)
        return PowerSeries(self.N, self.D, P @ self.coeffs[:P.shape[1]])

    # -- evaluation ---------------------------------------------------------

    def __call__(self, z) -> complex:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        mons = monomial_values(z, self.D)
        return complex(mons @ self.coeffs)

    def __repr__(self):
        return f"PowerSeries(N={self.N}, D={self.D}, nnz={int(np.count_nonzero(self.coeffs))})"


def principal_power(c, m) -> complex:
    return complex(np.power(complex(c), m))


def monomial_values(z: np.ndarray, D: int) -> np.ndarray:
    """z^alpha for all |alpha| <= D."""
    arr = mi.index_array(len(z), D)
    return np.prod(np.power.outer(z, np.arange(D + 1))[np.arange(len(z)), arr], axis=1)


def multiply_coeffs(N: int, D: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = mi.basis_size(N, D)
    if N == 1:
        return np.convolve(a, b)[:n]
    I, J, K = mi.product_table(N, D)
    nz = a[I] != 0
    prod = a[I[nz]] * b[J[nz]]
    Kn = K[nz]
    return np.bincount(Kn, weights=prod.real, minlength=n) + 1j * np.bincount(Kn, weights=prod.imag, minlength=n)


def linear_power(N: int, D: int, c0: complex, grad, m) -> PowerSeries:
    """(c0 + sum grad_j z_j)^m in closed form, principal branch of c0^m.

    Requires ||grad|| < |c0| for convergence on the closed ball.
    """
    grad = np.asarray(grad, dtype=complex)
    c0 = complex(c0)
    arr = mi.index_array(N, D)
    k = mi.orders(N, D)
    # generalized binomial(m, k) by its product recursion, exact for integer m
    binom = np.ones(D + 1)
    for j in range(1, D + 1):
        binom[j] = binom[j - 1] * (m - j + 1) / j
    ratio = grad / c0
    with np.errstate(divide="ignore", invalid="ignore"):
        logabs = np.log(np.abs(ratio))
        expo = np.where(arr > 0, arr * logabs[None, :], 0.0).sum(axis=1)
    lmult = gammaln(k + 1.0) - gammaln(arr + 1.0).sum(axis=1)
    mag = np.exp(lmult + expo)
    phase = np.prod(np.where(arr > 0, (ratio / np.where(ratio == 0, 1, np.abs(ratio)))[None, :] ** arr, 1.0), axis=1)
    coeffs = binom[k] * mag * phase * principal_power(c0, m)
    return PowerSeries(N, D, coeffs)


def linear_log(N: int, D: int, c0: complex, grad) -> PowerSeries:
    """log(c0 + sum grad_j z_j), principal log(c0)."""
    # log(1 + u) = sum_{k>=1} (-1)^{k+1} u^k / k, u^k expanded multinomially
    grad = np.asarray(grad, dtype=complex) / complex(c0)
    arr = mi.index_array(N, D)
    k = mi.orders(N, D)
    with np.errstate(divide="ignore", invalid="ignore"):
        logabs = np.log(np.abs(grad))
        expo = np.where(arr > 0, arr * logabs[None, :], 0.0).sum(axis=1)
    lmult = gammaln(k + 1.0) - gammaln(arr + 1.0).sum(axis=1)
    phase = np.prod(np.where(arr > 0, (grad / np.where(grad == 0, 1, np.abs(grad)))[None, :] ** arr, 1.0), axis=1)
    kk = np.where(k > 0, k, 1)
    coeffs = np.exp(lmult + expo) * phase * ((-1.0) ** (kk + 1)) / kk
    coeffs = coeffs.astype(complex)
    coeffs[0] = np.log(complex(c0))
    return PowerSeries(N, D, coeffs)


def expand_lft_denominator(phi, m, D: int) -> PowerSeries:
    """(<z, C> + d)^(-m) as a truncated series."""
    if not abs(phi.d) > np.linalg.norm(phi.C):
        raise ValueError("|d| <= ||C||: the denominator series diverges on the closed ball")
    return linear_power(phi.N, D, phi.d, np.conj(phi.C), -m)


def map_components(phi, D: int) -> list[PowerSeries]:
    inv = expand_lft_denominator(phi, 1, D)
    comps = []
    for i in range(phi.N):
        num = PowerSeries.linear(phi.N, D, phi.B[i], phi.A[i])
        comps.append(num * inv)
    return comps


_POWER_CACHE: dict = {}


def _multiplier(N: int, D: int, a: np.ndarray):
    """Sparse matrix of b -> a * b truncated at D."""
    from scipy import sparse

    n = mi.basis_size(N, D)
    if N == 1:
        I = np.repeat(np.arange(n), n)
        J = np.tile(np.arange(n), n)
        keep = (I + J < n) & (a[I] != 0)
        return sparse.csr_matrix((a[I[keep]], (I[keep] + J[keep], J[keep])), shape=(n, n))
    I, J, K = mi.product_table(N, D)
    nz = a[I] != 0
    return sparse.csr_matrix((a[I[nz]], (K[nz], J[nz])), shape=(n, n))


def map_power_table(phi, D: int, cols: int | None = None) -> np.ndarray:
    """Matrix whose column alpha holds the monomial coefficients of phi^alpha.

    Rows run over degrees <= D; columns over degrees <= cols (default D).
    """
    cols = D if cols is None else cols
    key = (phi.matrix.tobytes(), D, cols)
    hit = _POWER_CACHE.get(key)
    if hit is not None:
        return hit
    N = phi.N
    n = mi.basis_size(N, D)
    comps = map_components(phi, D)
    arr = mi.index_array(N, cols)
    P = np.zeros((n, len(arr)), dtype=complex)
    P[0, 0] = 1.0
    if len(arr) > 1:
        # column alpha = phi_j * column (alpha - e_j), j the last nonzero slot; one grade at a time
        last = N - 1 - np.argmax(arr[:, ::-1] > 0, axis=1)
        prev = arr.copy()
        prev[np.arange(len(arr)), last] -= 1
        prev_pos = mi.rank(prev)
        ords = mi.orders(N, cols)
        mult = [_multiplier(N, D, c.coeffs) for c in comps]
        for k in range(1, cols + 1):
            in_grade = ords == k
            for j in range(N):
                sel = np.flatnonzero(in_grade & (last == j))
                if sel.size:
                    P[:, sel] = mult[j] @ P[:, prev_pos[sel]]
    P.setflags(write=False)
    if len(_POWER_CACHE) > 64:
        _POWER_CACHE.clear()
    _POWER_CACHE[key] = P
    return P

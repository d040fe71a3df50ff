"""Long one-variable coefficient sequences for kernel tests close to the boundary.

Functions of a single variable z1 form an invariant subspace for every
operator built from symbols and maps that only involve z1.  On that
subspace the norm is sum |c_k|^2 omega_k with omega_k = k! Gamma(t) / Gamma(t + k),
the weight of z1^k in the ball space with kernel exponent t (N = 1 Hardy is t = 1).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import fftconvolve, lfilter
from scipy.special import gammaln, gammasgn

MAX_LENGTH = 1 << 23


def slice_weights(t: float, L: int) -> np.ndarray:
    k = np.arange(L, dtype=float)
    return np.exp(gammaln(k + 1.0) + gammaln(t) - gammaln(t + k))


def length_for(r: float, t: float, tol: float = 1e-14) -> int:
    """Length after which normalized-kernel coefficients at radius r fall below tol."""
    h = 1.0 - r
    L = int(math.ceil((math.log(1.0 / tol) + max(t, 1.0) * math.log(1.0 / h) + 4.0) / -math.log(r)))
    if L > MAX_LENGTH:
        raise ValueError(f"radius {r} needs {L} coefficients, above the cap {MAX_LENGTH}")
    return max(L, 16)


def binomial_series(lam: complex, p: float, L: int) -> np.ndarray:
    """Coefficients of (1 - lam z)^(-p)."""
    out = np.zeros(L, dtype=complex)
    if float(p).is_integer() and p <= 0:
        m = int(-p)
        for k in range(min(m, L - 1) + 1):
            out[k] = math.comb(m, k) * (-lam) ** k
        return out
    if lam == 0:
        out[0] = 1.0
        return out
    k = np.arange(L, dtype=float)
    mag = np.exp(gammaln(p + k) - gammaln(p) - gammaln(k + 1.0) + k * math.log(abs(lam)))
    sign = gammasgn(p + k) * gammasgn(p)
    phase = np.exp(1j * k * np.angle(lam))
    return sign * mag * phase


def linear_power(c0: complex, c1: complex, m: float, L: int) -> np.ndarray:
    """(c0 + c1 z)^m with the principal branch of c0^m; needs |c1| < |c0|."""
    c0 = complex(c0)
    return complex(c0**m) * binomial_series(-complex(c1) / c0, -m, L)


def trim(x: np.ndarray, rel: float = 1e-18) -> np.ndarray:
    """Drop trailing coefficients below rel * max |x|."""
    big = np.flatnonzero(np.abs(x) > rel * np.max(np.abs(x), initial=0.0))
    return x[: big[-1] + 1] if len(big) else x[:1]


def multiply(a: np.ndarray, b: np.ndarray, L: int | None = None) -> np.ndarray:
    L = max(len(a), len(b)) if L is None else L
    a, b = trim(a), trim(b)
    if min(len(a), len(b)) <= 64:
        short, long_ = (a, b) if len(a) <= len(b) else (b, a)
        out = lfilter(short, [1.0], np.concatenate([long_, np.zeros(max(0, L - len(long_)), dtype=complex)]))
        return out[:L]
    return fftconvolve(a, b)[:L]


def multiply_binomial(x: np.ndarray, lam: complex, p: float) -> np.ndarray:
    """x times (1 - lam z)^(-p), by recursive filtering when p is an integer."""
    if float(p).is_integer():
        m = int(p)
        out = x.astype(complex)
        for _ in range(abs(m)):
            out = lfilter([1.0], [1.0, -lam], out) if m > 0 else lfilter([1.0, -lam], [1.0], out)
        return out
    return fftconvolve(x, binomial_series(lam, p, len(x)))[: len(x)]


def coanalytic_toeplitz(g: np.ndarray, c: np.ndarray, w: np.ndarray) -> np.ndarray:
    """T_{conj g} c: out_m = sum_j conj(g_j) c_{m+j} omega_{m+j} / omega_m."""
    y = (c * w)[::-1]
    gg = np.conj(trim(np.asarray(g)))
    if len(gg) <= 64:
        out = lfilter(gg, [1.0], y)
    else:
        out = fftconvolve(y, gg)[: len(y)]
    return out[::-1] / w


def inner(a: np.ndarray, b: np.ndarray, w: np.ndarray) -> complex:
    n = min(len(a), len(b))
    return complex(np.sum(a[:n] * np.conj(b[:n]) * w[:n]))


def norm(a: np.ndarray, w: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(a) ** 2 * w[: len(a)])))


def kernel(w1: complex, t: float, L: int) -> np.ndarray:
    """K_w restricted to the z1 slice: (1 - conj(w1) z)^(-t)."""
    return binomial_series(np.conj(w1), t, L)


def normalized_kernel(w1: complex, t: float, L: int) -> np.ndarray:
    return kernel(w1, t, L) * (1.0 - abs(w1) ** 2) ** (t / 2)


def kernel_after_disk_map(w1: complex, t: float, a: complex, b: complex, c: complex, d: complex, L: int) -> np.ndarray:
    """K_w o phi for phi(z) = (a z + b)/(c z + d), as (cz + d)^t (q0 + q1 z)^(-t).

    The two principal powers are tied back to (1 - conj(w) phi)^(-t) by a
    unimodular constant fixed at z = 0.
    """
    wb = np.conj(w1)
    q0, q1 = d - wb * b, c - wb * a
    seq = multiply(linear_power(d, c, t, L), linear_power(q0, q1, -t, L), L)
    target = complex((1.0 - wb * b / d) ** (-t))
    return seq * (target / seq[0])

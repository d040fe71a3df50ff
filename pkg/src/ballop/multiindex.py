"""Multi-indices, graded-lex enumeration and monomial norms."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from ballop.spaces import SpaceSpec

EXACT_ORDER_LIMIT = 20


class MultiIndex(tuple):
    """Immutable tuple of non-negative ints with a cached total order."""

    def __new__(cls, entries):
        entries = tuple(int(e) for e in entries)
        if len(entries) == 0:
            raise ValueError("multi-index needs at least one entry")
        if any(e < 0 for e in entries):
            raise ValueError(f"negative entry in multi-index {entries}")
        obj = super().__new__(cls, entries)
        obj._order = sum(entries)
        return obj

    @property
    def order(self) -> int:
        return self._order

    @property
    def N(self) -> int:
        return len(self)

    def factorial(self) -> int:
        return math.prod(math.factorial(a) for a in self)

    def __add__(self, other):
        return MultiIndex(a + b for a, b in zip(self, other))

    def __repr__(self):
        return f"MultiIndex{tuple(self)}"


def _grade(N: int, k: int):
    """All indices of order k in descending lex order ((k,0,..) first)."""
    if N == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _grade(N - 1, k - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _enumerate(N: int, D: int) -> tuple[MultiIndex, ...]:
    if N < 1:
        raise ValueError("dimension N must be >= 1")
    if D < 0:
        raise ValueError("max order D must be >= 0")
    out = []
    for k in range(D + 1):
        out.extend(MultiIndex(a) for a in _grade(N, k))
    return tuple(out)


def enumerate_up_to(N: int, D: int) -> list[MultiIndex]:
    """All multi-indices with |alpha| <= D, graded then lexicographic."""
    return list(_enumerate(N, D))


def basis_size(N: int, D: int) -> int:
    return math.comb(D + N, N)


def grade_start(N: int, k: int) -> int:
    """Position of the first index of order k."""
    return math.comb(k - 1 + N, N) if k > 0 else 0


@lru_cache(maxsize=None)
def _position_table(N: int, D: int) -> dict:
    return {a: i for i, a in enumerate(_enumerate(N, D))}


def position(alpha, D: int | None = None) -> int:
    """Inverse of the enumeration: index -> position."""
    alpha = MultiIndex(alpha)
    return _position_table(alpha.N, alpha.order if D is None else max(D, alpha.order))[alpha]


def index_at(N: int, p: int) -> MultiIndex:
    D = 0
    while basis_size(N, D) <= p:
        D += 1
    return _enumerate(N, D)[p]


@lru_cache(maxsize=None)
def index_array(N: int, D: int) -> np.ndarray:
    """(n, N) int array of the enumeration; read-only."""
    arr = np.array(_enumerate(N, D), dtype=np.int64).reshape(-1, N)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def orders(N: int, D: int) -> np.ndarray:
    o = index_array(N, D).sum(axis=1)
    o.setflags(write=False)
    return o


def rank(alpha_arr: np.ndarray) -> np.ndarray:
    """Vectorized position of each row of an (n, N) index array."""
    a = np.atleast_2d(np.asarray(alpha_arr, dtype=np.int64))
    N = a.shape[1]
    k = a.sum(axis=1)
    pos = _grade_starts(N, k)
    rem = k.copy()
    for j in range(N - 1):
        m = N - 1 - j
        # count tuples with a larger entry in slot j
        gap = rem - a[:, j]
        pos += _comb_vec(gap - 1 + m, m, gap > 0)
        rem = rem - a[:, j]
    return pos


def _comb_vec(n: np.ndarray, k: int, mask: np.ndarray) -> np.ndarray:
    from scipy.special import comb

    out = np.zeros(n.shape, dtype=np.int64)
    if mask.any():
        out[mask] = np.rint(comb(n[mask], k, exact=False)).astype(np.int64)
    return out


def _grade_starts(N: int, k: np.ndarray) -> np.ndarray:
    return _comb_vec(k - 1 + N, N, k > 0)


@lru_cache(maxsize=None)
def product_table(N: int, D: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Triples (i, j, k) with index_i + index_j = index_k and order <= D."""
    arr = index_array(N, D)
    ords = orders(N, D)
    I, J = [], []
    for i in range(len(arr)):
        m = basis_size(N, D - int(ords[i]))
        I.append(np.full(m, i, dtype=np.int64))
        J.append(np.arange(m, dtype=np.int64))
    I = np.concatenate(I)
    J = np.concatenate(J)
    K = rank(arr[I] + arr[J])
    out = (I, J, K)
    for v in out:
        v.setflags(write=False)
    return out


# -- factorials and norms ---------------------------------------------------


def log_factorial(alpha: np.ndarray) -> np.ndarray:
    """log(alpha!) row-wise for an (n, N) array."""
    from scipy.special import gammaln

    return gammaln(np.asarray(alpha, dtype=float) + 1.0).sum(axis=-1)


def _exact_norm_sq(kind: str, N: int, s: float | None, alpha: MultiIndex) -> float:
    k = alpha.order
    af = alpha.factorial()
    if kind == "hardy":
        return af * math.factorial(N - 1) / math.factorial(N - 1 + k)
    if kind == "dirichlet":
        return 1.0 if k == 0 else k * af / math.factorial(k)
    # Bergman: alpha! Gamma(t) / Gamma(t + k), t = N + s + 1, via the rising factorial
    t = N + s + 1.0
    rising = 1.0
    for j in range(k):
        rising *= t + j
    return af / rising


def _log_norm_sq(kind: str, N: int, s: float | None, alpha_arr: np.ndarray) -> np.ndarray:
    from scipy.special import gammaln

    alpha_arr = np.atleast_2d(alpha_arr)
    k = alpha_arr.sum(axis=1).astype(float)
    lf = log_factorial(alpha_arr)
    if kind == "hardy":
        return lf + gammaln(N) - gammaln(N + k)
    if kind == "dirichlet":
        with np.errstate(divide="ignore"):
            out = np.log(np.where(k > 0, k, 1.0)) + lf - gammaln(k + 1.0)
        return np.where(k > 0, out, 0.0)
    t = N + s + 1.0
    return lf + gammaln(t) - gammaln(t + k)


def _check(kind: str, s):
    if kind not in ("hardy", "bergman", "dirichlet"):
        raise ValueError(f"unknown space kind {kind!r}")
    if kind == "bergman" and (s is None or s <= -1):
        raise ValueError(f"Bergman weight s must be > -1, got {s}")


def monomial_norm_sq(space: "SpaceSpec", alpha) -> float:
    """||z^alpha||^2 in the given space."""
    alpha = MultiIndex(alpha)
    if alpha.N != space.N:
        raise ValueError(f"multi-index {alpha} does not match N={space.N}")
    _check(space.kind, space.s)
    if alpha.order <= EXACT_ORDER_LIMIT:
        return _exact_norm_sq(space.kind, space.N, space.s, alpha)
    return float(np.exp(_log_norm_sq(space.kind, space.N, space.s, np.array([alpha]))[0]))


def monomial_norm_sq_log_path(space: "SpaceSpec", alpha) -> float:
    """Same quantity through log-gamma only (used to cross-check the exact path)."""
    alpha = MultiIndex(alpha)
    _check(space.kind, space.s)
    return float(np.exp(_log_norm_sq(space.kind, space.N, space.s, np.array([alpha]))[0]))


@lru_cache(maxsize=None)
def _weights(kind: str, N: int, s, D: int) -> np.ndarray:
    _check(kind, s)
    idx = _enumerate(N, D)
    w = np.empty(len(idx))
    small = orders(N, D) <= EXACT_ORDER_LIMIT
    for i in np.flatnonzero(small):
        w[i] = _exact_norm_sq(kind, N, s, idx[i])
    big = ~small
    if big.any():
        w[big] = np.exp(_log_norm_sq(kind, N, s, index_array(N, D)[big]))
    w.setflags(write=False)
    return w


def norm_weights(space: "SpaceSpec", D: int) -> np.ndarray:
    """Vector of omega_alpha over the graded basis up to order D."""
    return _weights(space.kind, space.N, space.s, D)


def weighted_dirichlet_norm_sq(s: float, alpha) -> float:
    """(|alpha|+1)^(1-s) times the Hardy weight of alpha."""
    alpha = MultiIndex(alpha)
    N = alpha.N
    hardy = _exact_norm_sq("hardy", N, None, alpha) if alpha.order <= EXACT_ORDER_LIMIT else float(
        np.exp(_log_norm_sq("hardy", N, None, np.array([alpha]))[0])
    )
    return (alpha.order + 1) ** (1.0 - s) * hardy

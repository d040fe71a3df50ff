"""Truncated operator matrices on the orthonormalized graded monomial basis.

The basis is e_alpha = z^alpha / sqrt(omega_alpha), so adjoints are plain
conjugate transposes.  Products of truncations are only exact on a
sub-block; builders that need a working degree D' > D compare D' against
D' + 2 and escalate when the restricted block moves.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from ballop import multiindex as mi
from ballop.lft import LinearFractionalMap, NotABallMapError
from ballop.series import PowerSeries, map_power_table
from ballop.spaces import SpaceSpec

STABILITY_TOL = 1e-9
ESCALATION_STEP = 4
ESCALATIONS = 2

SeriesSource = Union[PowerSeries, Callable[[int], PowerSeries]]


class InexactMatrixError(RuntimeError):
    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True, eq=False)
class GradedOperator:
    space: SpaceSpec
    D: int
    M: np.ndarray
    exact_degree: int = -1  # columns of degree <= this are exact; -1 means all
    stability: float = 0.0  # max entry change under working-degree increase
    working_degree: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = mi.basis_size(self.space.N, self.D)
        if self.M.shape != (n, n):
            raise ValueError(f"matrix shape {self.M.shape} does not match basis size {n}")
        if self.exact_degree < 0:
            object.__setattr__(self, "exact_degree", self.D)
        self.M.setflags(write=False)

    @property
    def size(self) -> int:
        return self.M.shape[0]

    def adjoint(self) -> "GradedOperator":
        return GradedOperator(self.space, self.D, self.M.conj().T.copy(), self.exact_degree, self.stability,
                              self.working_degree)

    def restrict(self, D: int) -> "GradedOperator":
        if D > self.D:
            raise ValueError("cannot restrict to a larger degree")
        n = mi.basis_size(self.space.N, D)
        return GradedOperator(self.space, D, self.M[:n, :n].copy(), min(self.exact_degree, D), self.stability,
                              self.working_degree)

    def _combine(self, other: "GradedOperator", M: np.ndarray) -> "GradedOperator":
        return GradedOperator(self.space, self.D, M, min(self.exact_degree, other.exact_degree),
                              max(self.stability, other.stability))

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        return self._combine(other, self.M @ other.M)

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        return self._combine(other, self.M + other.M)

    def __sub__(self, other: "GradedOperator") -> "GradedOperator":
        return self._combine(other, self.M - other.M)

    def __mul__(self, c) -> "GradedOperator":
        return GradedOperator(self.space, self.D, self.M * c, self.exact_degree, self.stability, self.working_degree)

    __rmul__ = __mul__

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.M @ x

    def norm(self) -> float:
        return float(np.linalg.norm(self.M, 2)) if self.size else 0.0

    def to_csv(self, path) -> None:
        write_matrix_csv(path, self)


# -- helpers ------------------------------------------------------------------


def _sqrt_weights(space: SpaceSpec, D: int) -> np.ndarray:
    return np.sqrt(space.weights(D))


def _series_at(u: SeriesSource, N: int, D: int) -> PowerSeries:
    """Series truncated at D; a PowerSeries of lower degree is treated as a polynomial."""
    if callable(u) and not isinstance(u, PowerSeries):
        s = u(D)
    else:
        s = u
    if s.N != N:
        raise ValueError("series dimension does not match the space")
    return s.truncate(D) if s.D >= D else s.pad(D)


def monomial_multiplication(N: int, D: int, coeffs: np.ndarray) -> np.ndarray:
    """Matrix of f -> u f on monomial coefficients, truncated at D."""
    n = mi.basis_size(N, D)
    I, J, K = mi.product_table(N, D)
    U = np.zeros((n, n), dtype=complex)
    U[K, J] = coeffs[I]
    return U


def _stable_build(build: Callable[[int], np.ndarray], N: int, D: int, Dp: int, tol: float,
                  escalate: bool, what: str) -> tuple[np.ndarray, float, int]:
    n = mi.basis_size(N, D)
    rounds = ESCALATIONS if escalate else 0
    for _ in range(rounds + 1):
        a = build(Dp)[:n, :n]
        b = build(Dp + 2)[:n, :n]
        change = float(np.max(np.abs(a - b))) if n else 0.0
        if change <= tol:
            return b, change, Dp + 2
        Dp += ESCALATION_STEP
    report = {"operator": what, "D": D, "working_degree": Dp - ESCALATION_STEP + 2, "change": change, "tol": tol}
    raise InexactMatrixError(f"{what}: truncation unstable (entry change {change:.3g} > {tol:g})", report)


# -- builders -----------------------------------------------------------------


def composition_matrix(space: SpaceSpec, phi: LinearFractionalMap, D: int, check: bool = True) -> GradedOperator:
    """C_phi on degrees <= D; column alpha holds the coefficients of phi^alpha."""
    if phi.N != space.N:
        raise ValueError("map dimension does not match the space")
    if check and not phi.is_self_map():
        raise NotABallMapError(f"not a self-map of the ball (sup norm {phi.sup_norm:.6g})")
    P = map_power_table(phi, D)
    sw = _sqrt_weights(space, D)
    M = sw[:, None] * P / sw[None, :]
    return GradedOperator(space, D, M, D, 0.0, D)


def composition_block(space: SpaceSpec, phi: LinearFractionalMap, rows: int, cols: int) -> np.ndarray:
    """Rectangular piece of C_phi: output degrees <= rows, input degrees <= cols."""
    P = map_power_table(phi, rows, cols)
    return _sqrt_weights(space, rows)[:, None] * P / _sqrt_weights(space, cols)[None, :]


def multiplication_matrix(space: SpaceSpec, u: SeriesSource, D: int) -> GradedOperator:
    """Analytic multiplication f -> u f, truncated at degree D."""
    s = _series_at(u, space.N, D)
    sw = _sqrt_weights(space, D)
    U = monomial_multiplication(space.N, D, s.coeffs)
    return GradedOperator(space, D, sw[:, None] * U / sw[None, :])


def mixed_toeplitz_matrix(space: SpaceSpec, u: SeriesSource, v: SeriesSource, D: int, Dp: int | None = None,
                          tol: float = STABILITY_TOL, escalate: bool = False) -> GradedOperator:
    """T with symbol conj(v) u, realized as T_{conj v} T_u = (M_v)^* M_u."""
    Dp = 2 * D if Dp is None else Dp
    if Dp < D:
        raise ValueError("working degree must be >= D")

    def build(k):
        Mu = multiplication_matrix(space, u, k).M
        Mv = multiplication_matrix(space, v, k).M
        return Mv.conj().T @ Mu

    M, change, used = _stable_build(build, space.N, D, Dp, tol, escalate, "mixed_toeplitz")
    return GradedOperator(space, D, M, D, change, used)


def singular_values(op: GradedOperator | np.ndarray, k: int | None = None) -> np.ndarray:
    M = op.M if isinstance(op, GradedOperator) else np.asarray(op)
    s = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    if k is None:
        return s
    if k > len(s):
        raise ValueError(f"asked for {k} singular values of a {M.shape} matrix")
    return s[:k]


def commutator_matrix(space: SpaceSpec, phi: LinearFractionalMap, psi: LinearFractionalMap, D: int,
                      Dp: int | None = None, tol: float = STABILITY_TOL, escalate: bool = True) -> GradedOperator:
    """[C_psi^*, C_phi] = C_psi^* C_phi - C_phi C_psi^* on degrees <= D."""
    if space.kind == "dirichlet":
        raise ValueError("Dirichlet commutators use the explicit adjoint formula (see dirichletops)")
    for m in (phi, psi):
        if not m.is_self_map():
            raise NotABallMapError("commutator needs self-maps of the ball")
    Dp = 2 * D if Dp is None else Dp

    def build(k):
        Mf = composition_matrix(space, phi, k, check=False).M
        Ms = composition_matrix(space, psi, k, check=False).M
        return Ms.conj().T @ Mf - Mf @ Ms.conj().T

    M, change, used = _stable_build(build, space.N, D, Dp, tol, escalate, "commutator")
    return GradedOperator(space, D, M, D, change, used)


def singular_floor(op: GradedOperator) -> float:
    """sigma_k with k the number of basis elements of degree <= D/2.

    For a compact operator this drifts to 0 as D grows; a non-compact one
    keeps it bounded below.
    """
    k = mi.basis_size(op.space.N, op.D // 2)
    s = singular_values(op)
    return float(s[k]) if k < len(s) else 0.0


def write_matrix_csv(path, op: GradedOperator) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["space", "N", "D"])
        w.writerow([op.space.label(), op.space.N, op.D])
        for row in op.M:
            flat = []
            for x in row:
                flat.extend((f"{x.real:.17g}", f"{x.imag:.17g}"))
            w.writerow(flat)

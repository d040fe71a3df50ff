"""Space descriptors, reproducing kernels and kernel inner products."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ballop import multiindex as mi
from ballop.lft import LinearFractionalMap, inner
from ballop.series import monomial_values

BOUNDARY_CLAMP = 1e-12


@dataclass(frozen=True)
class SpaceSpec:
    """Hardy, weighted Bergman (weight s > -1) or Dirichlet space on B_N."""

    kind: str
    N: int
    s: float | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in ("hardy", "bergman", "dirichlet"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if kind == "bergman":
            if self.s is None or self.s <= -1:
                raise ValueError(f"Bergman weight s must be > -1, got {self.s}")
            object.__setattr__(self, "s", float(self.s))
        elif self.s is not None:
            object.__setattr__(self, "s", None)

    @classmethod
    def hardy(cls, N: int) -> "SpaceSpec":
        return cls("hardy", N)

    @classmethod
    def bergman(cls, N: int, s: float = 0.0) -> "SpaceSpec":
        return cls("bergman", N, s)

    @classmethod
    def dirichlet(cls, N: int) -> "SpaceSpec":
        return cls("dirichlet", N)

    @property
    def t(self) -> float | None:
        """Kernel exponent: N (Hardy), N + s + 1 (Bergman), undefined (Dirichlet)."""
        if self.kind == "hardy":
            return float(self.N)
        if self.kind == "bergman":
            return self.N + self.s + 1.0
        return None

    def weights(self, D: int) -> np.ndarray:
        return mi.norm_weights(self, D)

    def label(self) -> str:
        return f"bergman(s={self.s:g})" if self.kind == "bergman" else self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "N": self.N, "s": self.s}


def _require_power_kernel(space: SpaceSpec, what: str):
    if space.kind == "dirichlet":
        raise ValueError(f"{what} is only available on Hardy and Bergman spaces")


def _point(z, N) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (N,):
        raise ValueError(f"expected a point of C^{N}")
    return z


def kernel_eval(space: SpaceSpec, w, z) -> complex:
    """K_w(z), principal branch."""
    w = _point(w, space.N)
    z = _point(z, space.N)
    x = 1.0 - inner(z, w)
    if space.kind == "dirichlet":
        return 1.0 - complex(np.log(x))
    return complex(x ** (-space.t))


def kernel_norm_sq(space: SpaceSpec, w) -> float:
    """||K_w||^2 = K_w(w)."""
    w = _point(w, space.N)
    r2 = min(float(np.vdot(w, w).real), 1.0 - BOUNDARY_CLAMP)
    if space.kind == "dirichlet":
        return 1.0 + math.log(1.0 / (1.0 - r2))
    return (1.0 - r2) ** (-space.t)


def normalized_kernel_eval(space: SpaceSpec, w, z) -> complex:
    return kernel_eval(space, w, z) / math.sqrt(kernel_norm_sq(space, w))


def backward_cross_inner(space: SpaceSpec, phi: LinearFractionalMap, psi: LinearFractionalMap, a, b) -> complex:
    """<C_psi^* k_a, C_phi^* k_b>, from C_psi^* K_a = K_{psi(a)}."""
    _require_power_kernel(space, "backward_cross_inner")
    a = _point(a, space.N)
    b = _point(b, space.N)
    t = space.t
    ra = min(float(np.vdot(a, a).real), 1.0 - BOUNDARY_CLAMP)
    rb = min(float(np.vdot(b, b).real), 1.0 - BOUNDARY_CLAMP)
    x = 1.0 - inner(phi(b), psi(a))
    return complex((1.0 - ra) ** (t / 2) * (1.0 - rb) ** (t / 2) * x ** (-t))


def kernel_monomial_coeffs(space: SpaceSpec, w, D: int) -> np.ndarray:
    """Monomial coefficients conj(w)^alpha / omega_alpha of K_w."""
    w = _point(w, space.N)
    return monomial_values(np.conj(w), D) / space.weights(D)


class KernelCoefficients(NamedTuple):
    values: np.ndarray  # orthonormal-basis coordinates
    tail: float  # ||w||^(D+1)-scaled truncation estimate


def coefficient_vector_of_kernel(space: SpaceSpec, w, D: int) -> KernelCoefficients:
    """K_w in the orthonormal basis e_alpha = z^alpha / sqrt(omega_alpha)."""
    w = _point(w, space.N)
    vals = monomial_values(np.conj(w), D) / np.sqrt(space.weights(D))
    r = float(np.linalg.norm(w))
    tail = r ** (D + 1) / (1.0 - r) if r < 1 else math.inf
    return KernelCoefficients(vals, tail)


def degree_for_tolerance(w, tol: float, cap: int = 400) -> int:
    """Smallest D with ||w||^(D+1) / (1 - ||w||) < tol."""
    r = float(np.linalg.norm(w))
    if r == 0.0:
        return 0
    D = math.ceil(math.log(tol * (1.0 - r)) / math.log(r)) - 1
    return int(min(max(D, 0), cap))


def graded_inner(space: SpaceSpec, f: np.ndarray, g: np.ndarray) -> complex:
    """<f, g> for monomial coefficient vectors truncated at a common order."""
    n = min(len(f), len(g))
    D = 0
    while mi.basis_size(space.N, D) < n:
        D += 1
    if mi.basis_size(space.N, D) != n:
        raise ValueError("coefficient vectors must cover complete grades")
    return complex(np.sum(f[:n] * np.conj(g[:n]) * space.weights(D)))

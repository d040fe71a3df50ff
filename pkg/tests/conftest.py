from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ballop.lft import ball_automorphism, diagonal_map, disk_map, unitary_map

settings.register_profile("ballop", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ballop")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# maps that appear throughout the suite
HYPERBOLIC = disk_map(1, 0.5, 0.5, 1)          # (z + 1/2)/(1 + z/2), fixes -1 and 1
INVOLUTION = ball_automorphism([0.5])          # (1/2 - z)/(1 - z/2)
ROT_QUARTER = disk_map(1j, 0, 0, 1)
ROT_HALF = disk_map(-1, 0, 0, 1)
DIAG_HALF = diagonal_map([1, 0.5])
DIAG_THIRD = diagonal_map([1, 1 / 3])
SWAP = unitary_map(np.array([[0, 1], [1, 0]]))
DIAG_I = diagonal_map([1, 1j])


def parabolic(tau):
    """Translation by tau in the right half-plane model, fixing 1 (self-map when Re tau >= 0)."""
    return disk_map(2 - tau, tau, -tau, 2 + tau)


def hyperbolic_with(p, q, lam):
    """Conjugate of w -> lam w by (z - p)/(z - q); fixes p and q."""
    M = np.array([[1, -p], [1, -q]], dtype=complex)
    F = np.linalg.inv(M) @ np.diag([lam, 1]) @ M
    return disk_map(F[0, 0], F[0, 1], F[1, 0], F[1, 1])

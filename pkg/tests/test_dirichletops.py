from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ballop import dirichletops as do
from ballop.lft import compose, diagonal_map, disk_map, identity_map, krein_adjoint, random_self_map
from ballop.series import PowerSeries

from conftest import HYPERBOLIC, INVOLUTION, DIAG_HALF, DIAG_THIRD, ROT_HALF, ROT_QUARTER

seeds = st.integers(0, 2**32 - 1)


def _poly(rng, N, deg, D):
    n = PowerSeries(N, deg).coeffs.size
    return PowerSeries(N, deg, rng.normal(size=n) + 1j * rng.normal(size=n)).pad(D)


def _z(D):
    return PowerSeries.monomial((1,), D)


def test_inner_product_weights():
    z = _z(4)
    assert do.dirichlet_inner(PowerSeries.constant(1, 4), PowerSeries.constant(1, 4)) == 1
    assert do.dirichlet_inner(z * z, z * z) == pytest.approx(2)
    assert do.dirichlet_inner(PowerSeries.monomial((1, 1), 2), PowerSeries.monomial((1, 1), 2)) == pytest.approx(1)


def test_kernel_reproduces():
    rng = np.random.default_rng(1)
    f = _poly(rng, 2, 5, 5)
    w = np.array([0.3, -0.2j])
    assert abs(do.dirichlet_inner(f, do.dirichlet_kernel(w, 5)) - f(w)) < 1e-14


def test_adjoint_examples():
    D = 6
    one = PowerSeries.constant(1, D)
    phi = disk_map(2, 1, 1, 2)
    out = do.dirichlet_adjoint_apply(phi, one, D)
    assert np.allclose(out.coeffs, do.dirichlet_kernel(phi(0), D).coeffs)
    f = _poly(np.random.default_rng(0), 1, 4, D)
    assert np.allclose(do.dirichlet_adjoint_apply(identity_map(1), f, D).coeffs, f.coeffs)
    half = disk_map(1, 0, 0, 2)
    out = do.dirichlet_adjoint_apply(half, _z(D), D)
    assert np.allclose(out.coeffs, (0.5 * _z(D)).coeffs)
    assert do.dirichlet_inner(out, _z(D)) == pytest.approx(do.dirichlet_inner(_z(D), _z(D).compose(half)))


@given(seeds, st.integers(1, 2))
def test_adjoint_relation(seed, N):
    rng = np.random.default_rng(seed)
    phi = random_self_map(rng, N)
    D = 6
    for _ in range(5):
        f, g = _poly(rng, N, D, D), _poly(rng, N, D, D)
        lhs = do.dirichlet_inner(do.dirichlet_adjoint_apply(phi, f, D), g)
        rhs = do.dirichlet_inner(f, g.compose(phi))
        assert abs(lhs - rhs) < 1e-10


@given(seeds)
def test_adjoint_matrix_routes_agree(seed):
    phi = random_self_map(np.random.default_rng(seed), 2)
    assert do.adjoint_route_gap(phi, 5) < 1e-10


def test_commutator_examples():
    I = identity_map(1)
    f = _poly(np.random.default_rng(2), 1, 5, 10)
    assert do.dirichlet_norm(do.dirichlet_commutator_apply(I, I, f)) < 1e-14
    for alpha in [(j, k) for j in range(9) for k in range(9 - j)]:
        g = PowerSeries.monomial(alpha, 16)
        assert do.dirichlet_norm(do.dirichlet_commutator_apply(DIAG_HALF, DIAG_THIRD, g)) < 1e-12
    half = disk_map(1, 0, 0, 2)
    a = do.dirichlet_commutator_apply(half, HYPERBOLIC, _z(12))
    b = do.dirichlet_commutator_compositional(half, HYPERBOLIC, _z(12))
    assert do.dirichlet_norm(a) > 0.1
    assert do.dirichlet_norm(a - b) < 1e-12


def _shrunk(rng, N, r=0.45):
    # r * phi(r z): still a self-map whose origin moves, but with a short truncation tail
    d = diagonal_map([r] * N)
    return compose(d, compose(random_self_map(rng, N), d))


def _routes_gap(seed, N):
    rng = np.random.default_rng(seed)
    if N == 1:
        phi, psi = random_self_map(rng, N), random_self_map(rng, N)
    else:
        phi, psi = _shrunk(rng, N), _shrunk(rng, N)
    f = _poly(rng, N, 3, 8)
    return do.dirichlet_norm(do.dirichlet_commutator_apply(phi, psi, f) - do.dirichlet_commutator_compositional(phi, psi, f))


@given(seeds)
def test_commutator_routes_agree_disk(seed):
    assert _routes_gap(seed, 1) < 1e-10


@settings(max_examples=6)
@given(seeds)
def test_commutator_routes_agree_ball(seed):
    assert _routes_gap(seed, 2) < 1e-10


def test_working_margin_is_capped():
    rng = np.random.default_rng(256)
    phi, psi = random_self_map(rng, 2), random_self_map(rng, 2)
    assert do.margin_needed(phi, krein_adjoint(psi), psi) > do.MARGIN_CAP[2]
    assert do.working_margin(phi, krein_adjoint(psi), psi) == do.MARGIN_CAP[2]


def test_flipped_bracket_disagrees():
    half = disk_map(1, 0, 0, 2)
    f = _z(12)
    flipped = do.dirichlet_commutator_apply(half, INVOLUTION, f, flipped_sign=True)
    ref = do.dirichlet_commutator_compositional(half, INVOLUTION, f)
    assert do.dirichlet_norm(flipped - ref) > 0.1
    # when phi commutes with sigma the bracket vanishes and both signs agree
    same = do.dirichlet_commutator_apply(DIAG_HALF, DIAG_THIRD, PowerSeries.monomial((0, 1), 8), flipped_sign=True)
    assert do.dirichlet_norm(same) < 1e-14


def test_zero_test():
    zt = do.commutator_zero_test(DIAG_HALF, DIAG_THIRD)
    assert zt.is_zero and zt.max_norm < 1e-12 and zt.degree == 8
    assert not do.commutator_zero_test(INVOLUTION, ROT_QUARTER).is_zero


def test_difference_verdicts():
    assert do.difference_compactness_verdict(HYPERBOLIC, HYPERBOLIC).verdict == "equal-maps"
    assert do.difference_compactness_verdict(disk_map(1, 0, 0, 2), disk_map(1, 0, 0, 3)).verdict == "both-compact"
    v = do.difference_compactness_verdict(ROT_QUARTER, disk_map(1, 0, 0, 2))
    assert v.verdict == "non-compact-difference"
    assert min(f for _, f in v.floors) > 0.5


def test_log_index_floor_separates():
    rising = [f for _, _, f in do.log_index_floor(INVOLUTION, ROT_QUARTER)]
    assert rising[-1] >= rising[0] > 0.5
    zero = [f for _, _, f in do.log_index_floor(ROT_QUARTER, ROT_HALF)]
    assert max(zero) < 1e-12
    falling = [f for _, _, f in do.log_index_floor(disk_map(1, 0, 0, 2), disk_map(1, 1, 0, 2))]
    assert falling[-1] < 0.2 * falling[0]

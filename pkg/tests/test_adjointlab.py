from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ballop import adjointlab as al
from ballop.lft import ball_automorphism, disk_map, identity_map, random_automorphism, random_ball_point, random_self_map
from ballop.series import PowerSeries, linear_power
from ballop.spaces import SpaceSpec

from conftest import INVOLUTION, DIAG_THIRD, ROT_QUARTER

seeds = st.integers(0, 2**32 - 1)
POWER_SPACES = st.sampled_from([SpaceSpec.hardy(1), SpaceSpec.hardy(2), SpaceSpec.hardy(3),
                                SpaceSpec.bergman(1, 0), SpaceSpec.bergman(2, 1), SpaceSpec.bergman(3, 2.5)])


def test_auxiliary_examples():
    aux = al.auxiliary_functions(SpaceSpec.hardy(1), identity_map(1))
    assert aux.g(0.3) == pytest.approx(1) and aux.h(0.3) == pytest.approx(1) and aux.sigma.is_identity()
    f = disk_map(2, 1, 1, 2)
    aux = al.auxiliary_functions(SpaceSpec.hardy(1), f)
    for z in (0.0, 0.3, -0.5 + 0.2j):
        assert aux.g(z) == pytest.approx(1 / (2 - z))
        assert aux.h(z) == pytest.approx(z + 2)
    assert aux.sigma.equals(disk_map(2, -1, -1, 2))
    aux = al.auxiliary_functions(SpaceSpec.hardy(2), DIAG_THIRD)
    assert aux.sigma.equals(DIAG_THIRD)
    assert aux.g([0.2, 0.4]) == pytest.approx(1) and aux.h([0.2, 0.4]) == pytest.approx(1)


def test_identity_examples():
    sp = SpaceSpec.hardy(1)
    assert al.verify_adjoint_identity(sp, identity_map(1), 0.4, -0.2j) == 0
    f = disk_map(2, 1, 1, 2)
    for z in (0.1, 0.5j, -0.7):
        assert al.verify_adjoint_identity(sp, f, z, 0) < 1e-15
        aux = al.auxiliary_functions(sp, f)
        assert aux.g(z) * np.conj(aux.h(0)) == pytest.approx(2 / (2 - z))


def test_identity_random_maps_bergman():
    rng = np.random.default_rng(7)
    sp = SpaceSpec.bergman(2, 1.0)
    for _ in range(3):
        assert al.adjoint_identity_sweep(sp, random_self_map(rng, 2), rng, 1000) < 1e-10


@given(seeds, POWER_SPACES)
def test_identity_property(seed, space):
    rng = np.random.default_rng(seed)
    phi = random_self_map(rng, space.N)
    aux = al.auxiliary_functions(space, phi)
    for _ in range(20):
        z, w = random_ball_point(rng, space.N), random_ball_point(rng, space.N)
        assert al.verify_adjoint_identity(space, phi, z, w, aux) < 1e-10


def test_identity_rejects_dirichlet():
    with pytest.raises(ValueError):
        al.auxiliary_functions(SpaceSpec.dirichlet(1), identity_map(1))


def test_lemma34_examples():
    assert al.verify_lemma34_normalization(identity_map(1), 0.3) == 0
    p = al.normalize_determinant(disk_map(2, 1, 1, 2))
    a, b, c, d = (complex(x) for x in (p.A[0, 0], p.B[0], np.conj(p.C[0]), p.d))
    assert abs(a * d - b * c - 1) < 1e-14
    assert abs(abs(d) ** 2 - 4 / 3) < 1e-14
    assert al.verify_lemma34_normalization(p, 0.0) < 1e-12
    r = al.inverse_boundary_derivative(disk_map(2, 1, 1, 2), 1.0)
    assert r.gap < 1e-8


@given(seeds, st.sampled_from([1.0, 2.0, 3.0, 2.5, 4.5]))
def test_lemma34_for_disk_automorphisms(seed, t):
    rng = np.random.default_rng(seed)
    p = al.normalize_determinant(random_automorphism(rng, 1))
    for _ in range(10):
        assert al.verify_lemma34_normalization(p, random_ball_point(rng, 1), t) < 1e-10


def test_lemma36_examples():
    assert al.verify_lemma36(SpaceSpec.hardy(1), ROT_QUARTER, 8).residual < 1e-14
    assert al.verify_lemma36(SpaceSpec.hardy(1), INVOLUTION, 16).residual < 1e-8
    rep = al.verify_lemma36(SpaceSpec.bergman(2, 0), ball_automorphism([0.5, 0]), 10)
    assert rep.residual < 1e-6 and rep.stable
    with pytest.raises(ValueError):
        al.verify_lemma36(SpaceSpec.hardy(1), disk_map(1, 0, 0, 2), 4)


def test_lemma36_fixed_ratio_residual_decreases():
    res = [r for _, r in al.lemma36_convergence(SpaceSpec.hardy(1), INVOLUTION, [4, 8, 12, 16])]
    assert all(b < a for a, b in zip(res, res[1:]))


def test_lemma37_factorization():
    one = PowerSeries.constant(2, 0)
    phi = ball_automorphism([0.5, 0])
    assert al.lemma37_residual(SpaceSpec.hardy(2), phi, one, one, 4) < 1e-12
    u = PowerSeries.constant(2, 1) + PowerSeries.monomial((1, 0), 1, 0.5)
    rep = al.verify_lemma37_factorization(SpaceSpec.hardy(2), phi, u, u, 6)
    assert rep.residual < 1e-8
    rng = np.random.default_rng(3)
    psi = random_automorphism(rng, 1, radius=0.5)
    v = linear_power(1, 12, 1.0, [-0.5], -1)
    rep = al.verify_lemma37_factorization(SpaceSpec.bergman(1, 1.5), psi, v, v, 5)
    assert rep.stable and rep.residual < 1e-8


def test_lemma37_kernel_limit():
    u = PowerSeries.constant(2, 1) + PowerSeries.monomial((1, 0), 1, 0.5)
    scan = al.lemma37_kernel_test(SpaceSpec.hardy(2), ball_automorphism([0.5, 0]), u, u)
    assert scan.r[-1] == 1 - 2**-16
    assert abs(scan.limit) < 1e-4
    # the raw values themselves decay toward the boundary
    assert abs(scan.values[-1]) < abs(scan.values[0])


def test_lemma37_slice_requires_z1_maps():
    u = PowerSeries.constant(2, 1)
    with pytest.raises(ValueError):
        al.lemma37_kernel_test(SpaceSpec.hardy(2), ball_automorphism([0.3, 0.3]), u, u, kmax=6)


V = 0.5 ** np.arange(60)  # 1/(1 - z/2)


def test_semicommutator_literal_case_vanishes():
    scan = al.semicommutator_kernel_test(SpaceSpec.hardy(1), [1.0], V, [0.0, 1.0], [1.0], kmax=12)
    assert max(abs(v) for v in scan.values) < 1e-12


def test_semicommutator_swapped_case_tends_to_zero():
    scan = al.semicommutator_kernel_test(SpaceSpec.hardy(1), [0.0, 1.0], [1.0], [1.0], V)
    assert abs(scan.limit) < 1e-4
    assert abs(scan.values[0]) > 1e-3  # genuinely non-zero away from the boundary

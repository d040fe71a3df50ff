from __future__ import annotations

import csv

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from ballop.lft import compose, disk_map, identity_map, random_automorphism, random_self_map
from ballop.opalg import (
    InexactMatrixError,
    commutator_matrix,
    composition_matrix,
    mixed_toeplitz_matrix,
    multiplication_matrix,
    singular_floor,
    singular_values,
    write_matrix_csv,
)
from ballop.series import PowerSeries, linear_power
from ballop.spaces import SpaceSpec

from conftest import INVOLUTION, ROT_HALF, ROT_QUARTER

H1 = SpaceSpec.hardy(1)
seeds = st.integers(0, 2**32 - 1)


def test_composition_examples():
    assert np.allclose(composition_matrix(SpaceSpec.hardy(2), identity_map(2), 5).M, np.eye(21))
    assert np.allclose(composition_matrix(H1, disk_map(1, 0, 0, 2), 8).M, np.diag(2.0 ** -np.arange(9)))
    col = composition_matrix(H1, disk_map(1, 0, -1, 2), 8).M[:, 1]
    assert np.allclose(col, [0] + [2.0**-k for k in range(1, 9)])


@given(seeds, st.sampled_from([SpaceSpec.hardy(1), SpaceSpec.bergman(1, 1.0), SpaceSpec.hardy(2)]))
def test_composition_convention(seed, space):
    # C_{phi o rho} = C_rho C_phi, exact once both factors are built above the kept degree
    rng = np.random.default_rng(seed)
    phi, rho = random_self_map(rng, space.N), random_self_map(rng, space.N)
    # the neglected tail of the inner sum decays like |rho(0)|^W
    assume(np.linalg.norm(rho(np.zeros(space.N))) < 0.6)
    D, W = 4, 60 if space.N == 1 else 30
    lhs = composition_matrix(space, compose(phi, rho), D).M
    rhs = (composition_matrix(space, rho, W).M @ composition_matrix(space, phi, W).M)[: lhs.shape[0], : lhs.shape[1]]
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_multiplication_examples():
    z = PowerSeries.monomial((1,), 1)
    assert np.allclose(multiplication_matrix(H1, PowerSeries.constant(1, 0), 6).M, np.eye(7))
    assert np.allclose(multiplication_matrix(H1, z, 6).M, np.eye(7, k=-1))
    B = multiplication_matrix(SpaceSpec.bergman(1, 0), z, 6).M
    assert np.allclose(np.diag(B, -1), [np.sqrt((k + 1) / (k + 2)) for k in range(6)])


def test_toeplitz_examples():
    z = PowerSeries.monomial((1,), 1)
    one = PowerSeries.constant(1, 0)
    assert np.allclose(mixed_toeplitz_matrix(H1, z, one, 6).M, multiplication_matrix(H1, z, 6).M)
    assert np.allclose(mixed_toeplitz_matrix(H1, one, z, 6).M, np.eye(7, k=1))
    g = lambda D: linear_power(1, D, 1.0, [-0.5], -1)  # 1/(1 - z/2)
    T = mixed_toeplitz_matrix(H1, g, g, 6, Dp=40)
    assert abs(T.M[0, 0] - 4 / 3) < 1e-9


def test_unstable_truncation_raises():
    g = lambda D: linear_power(1, D, 1.0, [-0.99], -1)
    with pytest.raises(InexactMatrixError) as err:
        mixed_toeplitz_matrix(H1, g, g, 4)
    assert err.value.report["operator"] == "mixed_toeplitz"


def test_singular_value_examples():
    assert np.allclose(singular_values(composition_matrix(H1, identity_map(1), 5), 3), 1)
    assert np.allclose(singular_values(np.zeros((4, 4)), 2), 0)
    assert np.allclose(singular_values(composition_matrix(H1, disk_map(1, 0, 0, 2), 5), 3), [1, 0.5, 0.25])


def test_commutator_examples():
    assert np.allclose(commutator_matrix(H1, identity_map(1), identity_map(1), 8).M, 0)
    assert np.allclose(commutator_matrix(H1, ROT_QUARTER, ROT_HALF, 8).M, 0, atol=1e-14)
    floors = [singular_floor(commutator_matrix(H1, INVOLUTION, ROT_HALF, D)) for D in (8, 16, 32)]
    assert min(floors) > 0.5


@given(seeds)
def test_adjoint_matches_conjugate_transpose_for_unitaries(seed):
    # for a unitary map C_U^* = C_{U^*}
    from ballop.lft import random_unitary, unitary_map

    U = random_unitary(np.random.default_rng(seed), 2)
    sp = SpaceSpec.bergman(2, 0.5)
    assert np.allclose(composition_matrix(sp, unitary_map(U), 5).adjoint().M,
                       composition_matrix(sp, unitary_map(U.conj().T), 5).M, atol=1e-12)


@given(seeds)
def test_automorphism_compositions_are_bounded(seed):
    # the orthonormal truncation of a bounded operator never exceeds its norm (1 + |a|)/(1 - |a|) in H^2(D)
    phi = random_automorphism(np.random.default_rng(seed), 1, radius=0.6)
    a = abs(phi.inverse()(0)[0])
    assert composition_matrix(H1, phi, 20).norm() <= np.sqrt((1 + a) / (1 - a)) + 1e-9


def test_matrix_csv(tmp_path):
    op = composition_matrix(H1, disk_map(1, 0, -1, 2), 3)
    p = tmp_path / "m.csv"
    write_matrix_csv(p, op)
    rows = list(csv.reader(p.open()))
    assert rows[0] == ["space", "N", "D"] and rows[1] == ["hardy", "1", "3"]
    back = np.array([[complex(float(r[2 * j]), float(r[2 * j + 1])) for j in range(4)] for r in rows[2:]])
    assert np.array_equal(back, op.M)

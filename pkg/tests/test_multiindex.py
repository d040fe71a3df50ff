from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ballop import multiindex as mi
from ballop.spaces import SpaceSpec


def test_enumeration_examples():
    assert mi.enumerate_up_to(2, 1) == [(0, 0), (1, 0), (0, 1)]
    assert len(mi.enumerate_up_to(2, 2)) == 6


def test_count_matches_brute_force():
    brute = sum(1 for a in itertools.product(range(5), repeat=3) if sum(a) <= 4)
    assert brute == 35
    assert mi.basis_size(3, 4) == 35 == len(mi.enumerate_up_to(3, 4))


@given(st.integers(1, 4), st.integers(0, 6), st.data())
def test_position_roundtrip(N, D, data):
    idx = mi.enumerate_up_to(N, D)
    p = data.draw(st.integers(0, len(idx) - 1))
    assert mi.index_at(N, p) == idx[p]
    assert mi.position(idx[p]) == p


@given(st.integers(1, 4), st.integers(0, 7))
def test_grades_are_contiguous(N, D):
    orders = mi.orders(N, D)
    assert np.all(np.diff(orders) >= 0)
    assert mi.basis_size(N, D) == math.comb(N + D, D)


def test_rank_agrees_with_position():
    arr = mi.index_array(3, 5)
    assert np.array_equal(mi.rank(arr), np.arange(len(arr)))


def test_product_table_adds_indices():
    I, J, K = mi.product_table(2, 4)
    idx = mi.enumerate_up_to(2, 4)
    for i, j, k in zip(I, J, K):
        assert idx[i] + idx[j] == idx[k]


def test_negative_entries_rejected():
    with pytest.raises(ValueError):
        mi.MultiIndex((1, -1))


def test_norm_examples():
    assert mi.monomial_norm_sq(SpaceSpec.hardy(2), (1, 0)) == pytest.approx(0.5, abs=1e-15)
    assert mi.monomial_norm_sq(SpaceSpec.dirichlet(2), (0, 0)) == 1.0
    assert mi.monomial_norm_sq(SpaceSpec.bergman(1, 0.0), (2,)) == pytest.approx(1 / 3, abs=1e-15)


def test_invalid_bergman_weight():
    with pytest.raises(ValueError):
        SpaceSpec.bergman(1, -1.0)


def _bergman_disk_quadrature(k, s):
    # ||z^k||^2 = (s+1) int_0^1 u^k (1-u)^s du with u = |z|^2
    val, _ = integrate.quad(lambda u: u**k * (1 - u) ** s, 0, 1, epsabs=1e-14, epsrel=1e-13)
    return (s + 1) * val


def _bergman_ball2_quadrature(a, b, s):
    # normalized volume on B_2: ||z^alpha||^2 = (s+1)(s+2) int_{u1+u2<1} u1^a u2^b (1-u1-u2)^s
    val, _ = integrate.dblquad(lambda u2, u1: u1**a * u2**b * (1 - u1 - u2) ** s, 0, 1, 0, lambda u1: 1 - u1,
                               epsabs=1e-14, epsrel=1e-12)
    return (s + 1) * (s + 2) * val


@pytest.mark.parametrize("s", [0.0, 1.0, 2.5])
def test_bergman_norms_against_quadrature(s):
    for k in range(7):
        assert abs(mi.monomial_norm_sq(SpaceSpec.bergman(1, s), (k,)) - _bergman_disk_quadrature(k, s)) < 1e-8
    space = SpaceSpec.bergman(2, s)
    for alpha in mi.enumerate_up_to(2, 6):
        assert abs(mi.monomial_norm_sq(space, alpha) - _bergman_ball2_quadrature(*alpha, s)) < 1e-8


def test_hardy_sphere_quadrature():
    # on the sphere of C^2, |z1|^2 is uniform on [0, 1]
    for a, b in mi.enumerate_up_to(2, 6):
        val, _ = integrate.quad(lambda u: u**a * (1 - u) ** b, 0, 1, epsabs=1e-15)
        assert abs(mi.monomial_norm_sq(SpaceSpec.hardy(2), (a, b)) - val) < 1e-12


@given(st.sampled_from(["hardy", "bergman", "dirichlet"]), st.integers(1, 3), st.integers(0, 30))
def test_exact_and_log_paths_agree(kind, N, k):
    space = {"hardy": SpaceSpec.hardy, "dirichlet": SpaceSpec.dirichlet}.get(kind, lambda n: SpaceSpec.bergman(n, 0.7))(N)
    alpha = (k,) + (0,) * (N - 1)
    a, b = mi.monomial_norm_sq(space, alpha), mi.monomial_norm_sq_log_path(space, alpha)
    assert abs(a - b) <= 1e-12 * max(a, 1.0)


def test_weighted_dirichlet_scale():
    for alpha in mi.enumerate_up_to(2, 3):
        assert mi.weighted_dirichlet_norm_sq(1.0, alpha) == pytest.approx(mi.monomial_norm_sq(SpaceSpec.hardy(2), alpha))
    assert mi.weighted_dirichlet_norm_sq(-1.0, (1, 0)) == pytest.approx(2.0)
    # N = 1: the Hardy weight of z is 1
    assert mi.weighted_dirichlet_norm_sq(2.0, (1,)) == pytest.approx(0.5)
    assert mi.weighted_dirichlet_norm_sq(2.0, (1, 0)) == pytest.approx(0.25)
    # s = 2 is the Bergman scale up to a bounded ratio
    ratios = [mi.weighted_dirichlet_norm_sq(2.0, (k,)) / mi.monomial_norm_sq(SpaceSpec.bergman(1, 0), (k,))
              for k in range(40)]
    assert max(ratios) / min(ratios) < 2.01

"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

from __future__ import annotations

import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import integrate

from ballop import adjointlab as al
from ballop import commutator as cm
from ballop import dirichletops as do
from ballop import multiindex as mi
from ballop.lft import (
    ball_automorphism, diagonal_map, random_automorphism, random_ball_point, random_self_map,
    random_sphere_point,
)
from ballop.series import PowerSeries
from ballop.spaces import SpaceSpec, graded_inner, kernel_monomial_coeffs

from conftest import DIAG_I, HYPERBOLIC, INVOLUTION, DIAG_HALF, DIAG_THIRD, ROT_HALF, ROT_QUARTER, SWAP

TIME_BUDGET = 60.0


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(n: int, title: str, ok: bool, detail: str):
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < TIME_BUDGET
        with capsys.disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'} {title}: {detail} ({elapsed:.1f}s)")
        return ok

    return emit


def _poly(rng, N, deg):
    n = mi.basis_size(N, deg)
    return PowerSeries(N, deg, rng.normal(size=n) + 1j * rng.normal(size=n))


def test_adjoint_identity(report):
    rng = np.random.default_rng(2024)
    worst, runs = 0.0, 0
    for N in (1, 2, 3):
        for space in (SpaceSpec.hardy(N), SpaceSpec.bergman(N, 0.0), SpaceSpec.bergman(N, 1.0),
                      SpaceSpec.bergman(N, 2.5)):
            for _ in range(20):
                phi = random_self_map(rng, N)
                assert phi.is_self_map()
                worst = max(worst, al.adjoint_identity_sweep(space, phi, rng, 1000))
                runs += 1
    ok = worst < 1e-10
    assert report(1, "adjoint identity on kernels", ok, f"max residual {worst:.2e} over {runs} maps x 1000 pairs")


def test_boundary_limits(report):
    lines, ok = [], True
    for space in (SpaceSpec.hardy(1), SpaceSpec.bergman(1, 0.0), SpaceSpec.bergman(1, 1.0),
                  SpaceSpec.bergman(1, 2.5)):
        scan = cm.lemma32_scan(space, HYPERBOLIC, HYPERBOLIC, [1.0], [1.0])
        expected = 3.0 ** space.t
        err = abs(scan.limit - expected)
        ok &= err < 1e-4
        lines.append(f"{space.label()} {scan.limit.real:.8f} vs {expected:.8f}")
    rng = np.random.default_rng(7)
    agree = 0
    for i in range(10):
        N = 1 + i % 2
        space = [SpaceSpec.hardy(N), SpaceSpec.bergman(N, 0.0), SpaceSpec.bergman(N, 2.5)][i % 3]
        phi, psi = random_automorphism(rng, N), random_automorphism(rng, N)
        z1 = random_sphere_point(rng, N)
        z2 = psi.inverse()(phi(z1))
        scan = cm.lemma32_scan(space, phi, psi, z1, z2 / np.linalg.norm(z2))
        agree += abs(scan.limit - scan.predicted) <= max(cm.AGREEMENT_FLOOR, scan.error)
    ok &= agree == 10
    assert report(2, "boundary limit of backward cross products", ok, "; ".join(lines) + f"; random pairs {agree}/10")


def test_diagonal_maps_commute(report):
    worst = 0.0
    for k in range(9):
        for alpha in mi.enumerate_up_to(2, k)[mi.basis_size(2, k - 1) if k else 0:]:
            f = PowerSeries.monomial(alpha, 16)
            worst = max(worst, do.dirichlet_norm(do.dirichlet_commutator_apply(DIAG_HALF, DIAG_THIRD, f)))
    ok = worst < 1e-12
    assert report(3, "Dirichlet commutator of the diagonal pair", ok, f"max norm {worst:.2e} on monomials to degree 8")


def test_dirichlet_adjoint_relation(report):
    rng = np.random.default_rng(11)
    worst, D = 0.0, 6
    for N in (1, 2):
        for _ in range(10):
            phi = random_self_map(rng, N)
            for _ in range(100):
                f, g = _poly(rng, N, D), _poly(rng, N, D)
                lhs = do.dirichlet_inner(do.dirichlet_adjoint_apply(phi, f, D), g)
                rhs = do.dirichlet_inner(f, g.compose(phi))
                worst = max(worst, abs(lhs - rhs))
    ok = worst < 1e-10
    assert report(4, "Dirichlet adjoint relation", ok, f"max |<C*f,g> - <f,C g>| = {worst:.2e}")


def test_adjoint_factorization_convergence(report):
    disk = al.lemma36_convergence(SpaceSpec.hardy(1), INVOLUTION, [4, 8, 12, 16])
    ball_phi = ball_automorphism([0.5, 0.0])
    ball = al.lemma36_convergence(SpaceSpec.bergman(2, 0.0), ball_phi, [4, 8, 12])
    decreasing = all(b < a for seq in (disk, ball) for (_, a), (_, b) in zip(seq, seq[1:]))
    r16 = al.verify_lemma36(SpaceSpec.hardy(1), INVOLUTION, 16).residual
    r12 = al.verify_lemma36(SpaceSpec.bergman(2, 0.0), ball_phi, 12).residual
    ok = decreasing and r16 < 1e-6 and r12 < 1e-5
    detail = (f"disk {[f'{r:.1e}' for _, r in disk]}, ball {[f'{r:.1e}' for _, r in ball]}; "
              f"disk D=16 {r16:.2e}, ball D=12 {r12:.2e}")
    assert report(5, "adjoint factorization residual", ok, detail)


def test_kernel_score_separation(report):
    small = [
        cm.commutator_kernel_score(SpaceSpec.hardy(1), ROT_QUARTER, ROT_HALF).score,
        cm.commutator_kernel_score(SpaceSpec.bergman(1, 2.5), ROT_QUARTER, ROT_HALF).score,
        cm.commutator_kernel_score(SpaceSpec.hardy(2), diagonal_map([1j, -1]), DIAG_I).score,
        cm.commutator_kernel_score(SpaceSpec.bergman(2, 1.0), diagonal_map([1j, -1]), DIAG_I).score,
    ]
    big, stable = [], True
    for space, phi, psi in ((SpaceSpec.hardy(1), INVOLUTION, ROT_QUARTER),
                            (SpaceSpec.bergman(1, 0.0), INVOLUTION, ROT_QUARTER),
                            (SpaceSpec.hardy(2), SWAP, DIAG_I)):
        base = cm.commutator_kernel_score(space, phi, psi, m=8, D=8, kmax=13).score
        doubled = [cm.commutator_kernel_score(space, phi, psi, **kw).score
                   for kw in ({"m": 16, "D": 8, "kmax": 13}, {"m": 8, "D": 16, "kmax": 13},
                              {"m": 8, "D": 8, "kmax": 26})]
        big.append(min([base] + doubled))
        stable &= all(abs(x - base) < 0.1 * base for x in doubled)
    ok = max(small) < 1e-6 and min(big) > 5e-2 and stable
    detail = f"commuting max {max(small):.1e}, non-compact min {min(big):.3f}, stable under doubling: {stable}"
    assert report(6, "kernel score separation", ok, detail)


def test_semi_multiplication(report):
    u = PowerSeries.constant(2, 1) + PowerSeries.monomial((1, 0), 1, 0.5)
    phi = ball_automorphism([0.5, 0.0])
    kernel_limit = abs(al.lemma37_kernel_test(SpaceSpec.hardy(2), phi, u, u).limit)
    v = 0.5 ** np.arange(60)
    semi_limit = abs(al.semicommutator_kernel_test(SpaceSpec.hardy(1), [0.0, 1.0], [1.0], [1.0], v).limit)
    u1 = PowerSeries.constant(1, 1) + PowerSeries.monomial((1,), 1, 0.5)
    v1 = PowerSeries.constant(1, 1) + PowerSeries.monomial((1,), 1, 1 / 3)
    fact = max(al.verify_lemma37_factorization(SpaceSpec.hardy(2), phi, u, u, 6).residual,
               al.verify_lemma37_factorization(SpaceSpec.bergman(1, 1.5), INVOLUTION, u1, v1, 5).residual)
    ok = kernel_limit < 1e-4 and semi_limit < 1e-4 and fact < 1e-8
    detail = f"kernel limits {kernel_limit:.1e}, {semi_limit:.1e}; factorization residual {fact:.1e}"
    assert report(7, "semi-multiplication modulo compacts", ok, detail)


def _bergman_quadrature(alpha, s):
    if len(alpha) == 1:
        val, _ = integrate.quad(lambda u: u ** alpha[0] * (1 - u) ** s, 0, 1, epsabs=1e-14, epsrel=1e-13)
        return (s + 1) * val
    a, b = alpha
    val, _ = integrate.dblquad(lambda u2, u1: u1**a * u2**b * (1 - u1 - u2) ** s, 0, 1, 0, lambda u1: 1 - u1,
                               epsabs=1e-14, epsrel=1e-12)
    return (s + 1) * (s + 2) * val


def test_reproducing_kernels_and_norms(report):
    rng = np.random.default_rng(5)
    worst_rep = 0.0
    for space in (SpaceSpec.hardy(1), SpaceSpec.hardy(2), SpaceSpec.bergman(1, 0.0), SpaceSpec.bergman(2, 2.5),
                  SpaceSpec.dirichlet(1), SpaceSpec.dirichlet(2)):
        D = 80 if space.N == 1 else 40
        for _ in range(10):
            w = random_ball_point(rng, space.N, 0.55)
            f = _poly(rng, space.N, 6).pad(D)
            worst_rep = max(worst_rep, abs(graded_inner(space, f.coeffs, kernel_monomial_coeffs(space, w, D)) - f(w)))
    worst_norm = 0.0
    for s in (0.0, 1.0, 2.5):
        for N in (1, 2):
            space = SpaceSpec.bergman(N, s)
            for alpha in mi.enumerate_up_to(N, 6):
                worst_norm = max(worst_norm, abs(mi.monomial_norm_sq(space, alpha) - _bergman_quadrature(alpha, s)))
    ok = worst_rep < 1e-10 and worst_norm < 1e-8
    assert report(8, "reproducing kernels and Bergman norms", ok,
                  f"max |<f,K_w> - f(w)| {worst_rep:.1e}; max norm gap {worst_norm:.1e}")


def test_cli_determinism(report):
    runs = [
        ["verdict", "--theorem", "3.1", "--map", '{"kind": "automorphism", "a": [0.5]}',
         "--map2", '{"kind": "disk", "a": [0, 1], "b": 0, "c": 0, "d": 1}', "--samples", "8", "--seed", "3"],
        ["adjoint-check", "--map", '{"kind": "automorphism", "a": [0.3, 0.2]}', "--space", "bergman", "--s", "1",
         "--samples", "200", "--seed", "9"],
    ]
    same = True
    for args in runs:
        outs = [subprocess.run([sys.executable, "-m", "ballop.cli", *args], capture_output=True, check=True).stdout
                for _ in range(2)]
        same &= outs[0] == outs[1] and len(outs[0]) > 0
    assert report(9, "repeated CLI runs", same, "byte-identical JSON" if same else "outputs differ")

"""Variational solvers against bisection/cobweb/finite-difference oracles."""

import math

import numpy as np
import pytest

from multigibbs.kernels import StepKernel, hom_functional, kernel_preset, motif_preset
from multigibbs.meanfield import (
    FieldProfile,
    MultistartSpec,
    critical_theta,
    profile_fixed_point,
    profile_gradient,
    profile_objective,
    quadratic_case,
    replica_symmetry_verdict,
    scalar_fixed_points,
    scalar_maximizers,
    scalar_objective,
    solve_free_energy,
    uniqueness_field,
)
from multigibbs.measures import BaseMeasure, ising_pm1, three_point

K2 = motif_preset("K2")
K3 = motif_preset("K3")
ONE = kernel_preset("complete")
TRI = kernel_preset("tripartite")
BIP = kernel_preset("bipartite", c=2.0)
MU = ising_pm1()


def tanh_fixed_point_oracle(theta, b=0.0, lo=1e-9, hi=1.0 - 1e-12):
    """Bisection for the positive root of t = tanh(2 theta t + b)."""
    def g(t):
        return t - math.tanh(2.0 * theta * t + b)
    assert g(lo) < 0 and g(hi) > 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


T_STAR = tanh_fixed_point_oracle(1.0)  # 0.95750402...


class TestScalarObjective:
    def test_zero_at_base_mean(self):
        assert scalar_objective(MU, 0.0, 0.0, 2, MU.tilt_mean(0.0)) == pytest.approx(0.0, abs=1e-13)

    def test_interior_value(self):
        t = 0.5
        gamma = ((1 + t) / 2) * math.log(1 + t) + ((1 - t) / 2) * math.log(1 - t)
        assert scalar_objective(MU, 1.0, 0.0, 2, t) == pytest.approx(0.25 - gamma, abs=1e-10)

    def test_boundary_atom_value(self):
        assert scalar_objective(MU, 1.0, 0.0, 2, 1.0) == pytest.approx(
            1.0 - math.log(2.0), abs=1e-13
        )

    def test_outside_hull_raises(self):
        with pytest.raises(ValueError):
            scalar_objective(MU, 1.0, 0.0, 2, 1.5)


class TestScalarMaximizers:
    def test_subcritical_unique_zero(self):
        rep = scalar_maximizers(MU, 0.3, 0.0, 2)
        assert len(rep.optimizers) == 1
        assert abs(rep.optimizers[0]) < 1e-9

    def test_supercritical_pair(self):
        rep = scalar_maximizers(MU, 1.0, 0.0, 2)
        assert len(rep.optimizers) == 2
        assert sorted(rep.optimizers) == pytest.approx([-T_STAR, T_STAR], abs=1e-9)
        assert all(r <= 1e-8 for r in rep.residuals)

    def test_field_selects_sign(self):
        rep = scalar_maximizers(MU, 1.0, 0.2, 2)
        assert len(rep.optimizers) == 1
        t = rep.optimizers[0]
        assert t > 0
        assert t == pytest.approx(tanh_fixed_point_oracle(1.0, 0.2), abs=1e-9)


class TestScalarFixedPoints:
    def test_zero_coupling_is_constant_map(self):
        roots = scalar_fixed_points(MU, 0.0, 0.0, 2)
        assert len(roots) == 1
        assert roots[0][0] == pytest.approx(0.0, abs=1e-12)

    def test_cobweb_structure(self):
        roots = scalar_fixed_points(MU, 1.0, 0.0, 2)
        xs = sorted(r for r, _ in roots)
        assert xs == pytest.approx([-T_STAR, 0.0, T_STAR], abs=1e-9)
        stability = {round(r, 6): stable for r, stable in roots}
        assert not stability[0.0]  # middle root repels
        assert stability[round(T_STAR, 6)] and stability[round(-T_STAR, 6)]

    def test_asymmetric_base(self):
        mu01 = BaseMeasure([0.0, 1.0], [0.5, 0.5])
        roots = scalar_fixed_points(mu01, 0.0, 0.0, 2)
        assert roots[0][0] == pytest.approx(0.5, abs=1e-12)


class TestQuadraticCase:
    def test_case_i(self):
        rep = quadratic_case(MU, 0.4)
        assert rep.case == 1 and rep.t == 0.0
        assert rep.threshold_theta == pytest.approx(0.5)
        assert rep.secasn_grid_ok

    def test_case_iii(self):
        rep = quadratic_case(MU, 1.0)
        assert rep.case == 3
        assert rep.t == pytest.approx(T_STAR, abs=1e-9)

    def test_case_ii(self):
        rep = quadratic_case(MU, 1.0, B=-0.3)
        assert rep.case == 2
        assert rep.t < 0

    def test_three_point_threshold(self):
        mu = three_point(0.5)
        rep = quadratic_case(mu, 0.95)
        assert rep.threshold_theta == pytest.approx(1.0)
        assert rep.case == 1
        rep = quadratic_case(mu, 1.05)
        assert rep.case == 3 and rep.t > 0

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            quadratic_case(BaseMeasure([0.0, 1.0], [0.5, 0.5]), 1.0)


class TestProfileObjective:
    def test_zero_profile_zero_theta(self):
        assert profile_objective(K2, ONE, MU, 0.0, 0.0, np.asarray([0.0])) == pytest.approx(0.0)

    def test_constant_reduction(self):
        t = 0.6
        expected = scalar_objective(MU, 1.0, 0.1, 2, t)
        got = profile_objective(K2, ONE, MU, 1.0, 0.1, np.asarray([t]))
        assert got == pytest.approx(expected, abs=1e-12)

    def test_tripartite_witness_beats_constants(self):
        w = math.exp(-4.0) / (math.exp(-4.0) + math.exp(4.0))
        mu = BaseMeasure([-1.0, 1.0], [1.0 - w, w])
        witness = profile_objective(K3, TRI, mu, 9.0, 0.0, np.asarray([-0.99, -0.99, 0.83]))
        g1 = hom_functional(K3, TRI, np.ones(3))
        best_const = scalar_maximizers(mu, 9.0 * g1, 0.0, 3).best_value
        assert witness > best_const

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(55)
        for _ in range(20):
            k = int(rng.integers(1, 4))
            kernel = TRI if k == 3 else (BIP if k == 2 else ONE)
            motif = K3 if k == 3 else K2
            theta = float(rng.uniform(-3, 3))
            b = float(rng.uniform(-0.5, 0.5))
            f = rng.uniform(-0.9, 0.9, k)
            d = rng.normal(size=k)
            d /= np.linalg.norm(d)
            grad = profile_gradient(motif, kernel, MU, theta, b, f)
            eps = 1e-5
            fd = (
                profile_objective(motif, kernel, MU, theta, b, f + eps * d)
                - profile_objective(motif, kernel, MU, theta, b, f - eps * d)
            ) / (2 * eps)
            assert fd == pytest.approx(float(grad @ d), rel=1e-6, abs=1e-8)


class TestProfileFixedPoint:
    def test_zero_theta_one_step(self):
        fp = profile_fixed_point(K2, ONE, MU, 0.0, 0.3, np.asarray([0.0]), damping=1.0)
        assert fp.converged
        assert fp.profile.values[0] == pytest.approx(MU.tilt_mean(0.3), abs=1e-11)

    def test_curie_weiss_constant(self):
        fp = profile_fixed_point(K2, ONE, MU, 1.0, 0.0, np.asarray([0.5]))
        assert fp.converged
        assert fp.profile.values[0] == pytest.approx(T_STAR, abs=1e-9)
        assert fp.residual <= 1e-10

    def test_bipartite_antiferromagnet(self):
        fp = profile_fixed_point(K2, BIP, MU, -5.0, 0.0, np.asarray([0.5, -0.5]))
        assert fp.converged
        a, b = fp.profile.values
        assert a > 0 > b
        assert a == pytest.approx(-b, abs=1e-9)

    def test_rejects_bad_damping(self):
        with pytest.raises(ValueError):
            profile_fixed_point(K2, ONE, MU, 1.0, 0.0, np.asarray([0.5]), damping=0.0)


class TestSolveFreeEnergy:
    def test_zero_theta(self):
        rep = solve_free_energy(K2, ONE, MU, 0.0, 0.0, MultistartSpec(n_random=8))
        assert rep.extras["Z"] == pytest.approx(0.0, abs=1e-12)
        assert len(rep.optimizers) == 1
        assert rep.optimizers[0].values[0] == pytest.approx(0.0, abs=1e-9)

    def test_scalar_consistency(self):
        rep = solve_free_energy(K2, ONE, MU, 1.0, 0.0, MultistartSpec(n_random=8))
        z_scalar = scalar_maximizers(MU, 1.0, 0.0, 2).best_value
        assert rep.extras["Z"] == pytest.approx(z_scalar, abs=1e-9)
        assert {round(float(p.values[0]), 6) for p in rep.optimizers} == {
            round(T_STAR, 6),
            round(-T_STAR, 6),
        }

    def test_tripartite_nonconstant_optimum(self):
        w = math.exp(-4.0) / (math.exp(-4.0) + math.exp(4.0))
        mu = BaseMeasure([-1.0, 1.0], [1.0 - w, w])
        rep = solve_free_energy(K3, TRI, mu, 9.0, 0.0, MultistartSpec(n_random=32, seed=3))
        best = rep.optimizers[0]
        assert best.spread() > 0.5
        assert all(r <= 1e-8 for r in rep.residuals)

    def test_monotone_in_theta(self):
        thetas = [0.0, 0.2, 0.4, 0.7, 1.0]
        zs = [
            solve_free_energy(K2, ONE, MU, th, 0.0, MultistartSpec(n_random=4)).extras["Z"]
            for th in thetas
        ]
        assert all(zs[i + 1] >= zs[i] - 1e-12 for i in range(len(zs) - 1))


class TestReplicaSymmetryVerdict:
    def test_curie_weiss_symmetric(self):
        v = replica_symmetry_verdict(K2, ONE, MU, 1.0, 0.0, MultistartSpec(n_random=16))
        assert v.verdict == "symmetric"
        cond = v.sufficient_conditions
        assert cond["regular"] and cond["theta_w_positive"] and cond["v_even"]

    def test_tripartite_broken(self):
        w = math.exp(-4.0) / (math.exp(-4.0) + math.exp(4.0))
        mu = BaseMeasure([-1.0, 1.0], [1.0 - w, w])
        v = replica_symmetry_verdict(K3, TRI, mu, 9.0, 0.0, MultistartSpec(n_random=32, seed=5))
        assert v.verdict == "broken"
        assert not v.sufficient_conditions["stochastically_nonnegative"]
        assert not v.sufficient_conditions["v_even"]

    def test_bipartite_negative_theta_broken(self):
        v = replica_symmetry_verdict(K2, BIP, MU, -5.0, 0.0, MultistartSpec(n_random=16))
        assert v.verdict == "broken"
        assert not v.sufficient_conditions["theta_w_positive"]
        best = v.report.optimizers[0]
        assert best.values[0] * best.values[1] < 0


class TestCriticalTheta:
    def test_fair_coin(self):
        assert critical_theta(MU, 2) == pytest.approx(0.5, abs=1e-6)

    def test_three_point(self):
        assert critical_theta(three_point(0.5), 2) == pytest.approx(1.0, abs=1e-6)

    def test_quartic_first_order_jump(self):
        # for v = 4 the maximizer jumps discontinuously across theta_c
        tc = critical_theta(MU, 4)
        below = scalar_maximizers(MU, tc - 1e-3, 0.0, 4)
        above = scalar_maximizers(MU, tc + 1e-3, 0.0, 4)
        assert max(abs(t) for t in below.optimizers) < 1e-6
        assert max(abs(t) for t in above.optimizers) > 0.5

    def test_requires_centered_mean(self):
        with pytest.raises(ValueError):
            critical_theta(BaseMeasure([0.0, 1.0], [0.5, 0.5]), 2)

    def test_requires_valid_bracket(self):
        with pytest.raises(ValueError):
            critical_theta(MU, 2, bracket=(0.7, 8.0))


class TestUniquenessField:
    def test_zero_theta_always_unique(self):
        b0, table = uniqueness_field(MU, 0.0, 2, np.arange(0.0, 0.3, 0.1))
        assert b0 == 0.0
        assert all(count == 1 for _, count, _ in table)

    def test_supercritical_needs_positive_field(self):
        grid = np.round(np.arange(0.0, 1.001, 0.01), 10)
        b0, table = uniqueness_field(MU, 1.0, 2, grid)
        assert b0 is not None and 0.0 < b0 < 1.0
        assert table[-1][1] == 1  # unique at B = 1

    def test_maximizer_sign_follows_field(self):
        _, table = uniqueness_field(MU, 1.0, 2, [0.2, 0.5, 1.0])
        for b, count, best in table:
            assert count == 1 and best > 0

    def test_support_hull_guard(self):
        with pytest.raises(ValueError):
            uniqueness_field(BaseMeasure([-2.0, 2.0], [0.5, 0.5]), 1.0, 2, [0.0])


def test_field_profile_helpers():
    prof = FieldProfile(np.asarray([0.5, 0.5]), np.asarray([1.0, -1.0]))
    assert prof.spread() == pytest.approx(1.0)
    assert prof.mean() == pytest.approx(0.0)
    assert prof.value_at(0.25) == 1.0 and prof.value_at(0.75) == -1.0
    other = FieldProfile(np.asarray([0.25, 0.75]), np.asarray([1.0, -1.0]))
    assert prof.sup_distance(other) == pytest.approx(2.0)  # they differ on (1/4, 1/2]

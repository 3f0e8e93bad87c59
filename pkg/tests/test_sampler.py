"""Finite-n model: exact tuple sums, Glauber correctness, enumeration oracles."""

import itertools
import math

import numpy as np
import pytest

from multigibbs.kernels import CouplingMatrix, er_quenched, kernel_preset, motif_preset
from multigibbs.measures import BaseMeasure, ising_pm1, three_point
from multigibbs.sampler import (
    ModelSpec,
    contrast,
    exact_glauber_stationarity,
    exact_small_n,
    glauber_sweep,
    hamiltonian,
    hamiltonian_stat,
    initial_state,
    local_field,
    local_fields,
    moment_diagnostics,
    permutation_invariance_check,
    sample_chain,
    site_conditional,
)

MU = ising_pm1()
K2 = motif_preset("K2")
K3 = motif_preset("K3")
K12 = motif_preset("K1_2")
ONE = kernel_preset("complete")
TRI = kernel_preset("tripartite")


def complete_coupling(n):
    return CouplingMatrix(1.0 - np.eye(n))


def naive_hamiltonian(motif, q, x):
    """Literal sum over distinct ordered tuples."""
    n, v = len(x), motif.v
    total = 0.0
    for tup in itertools.permutations(range(n), v):
        prod = 1.0
        for a, b in motif.edges0:
            prod *= q[tup[a], tup[b]]
        for a in range(v):
            prod *= x[tup[a]]
        total += prod
    return total / n**v


def naive_local_field(motif, q, x, i):
    """Literal anchored sum with the symmetrized tensor."""
    n, v = len(x), motif.v
    total = 0.0
    others = [j for j in range(n) if j != i]
    for tup in itertools.permutations(others, v - 1):
        full = (i,) + tup
        sym = 0.0
        for sigma in itertools.permutations(range(v)):
            prod = 1.0
            for a, b in motif.edges0:
                prod *= q[full[sigma[a]], full[sigma[b]]]
            sym += prod
        sym /= math.factorial(v)
        for j in tup:
            sym *= x[j]
        total += sym
    return v * total / n ** (v - 1)


class TestHamiltonian:
    def test_zero_configuration(self):
        mu3 = three_point(0.5)
        spec = ModelSpec(K2, mu3, 1.0, complete_coupling(5))
        assert hamiltonian(spec, np.zeros(5)) == 0.0

    def test_complete_pair_identity(self):
        rng = np.random.default_rng(0)
        x = rng.choice([-1.0, 1.0], 6)
        spec = ModelSpec(K2, MU, 1.0, complete_coupling(6))
        expected = (x.sum() ** 2 - (x**2).sum()) / 36.0
        assert hamiltonian(spec, x) == pytest.approx(expected, rel=1e-13)
        assert hamiltonian(spec, x) == pytest.approx(
            naive_hamiltonian(K2, spec.Q, x), rel=1e-13
        )

    def test_all_ones_complete_motif(self):
        n = 4
        motif = motif_preset("Kv", 4)
        spec = ModelSpec(motif, MU, 0.2, complete_coupling(n))
        assert hamiltonian(spec, np.ones(n)) == pytest.approx(
            math.factorial(n) / n**n, rel=1e-13
        )

    @pytest.mark.parametrize("motif", [K3, K12], ids=["K3", "K1_2"])
    def test_dense_vs_naive(self, motif):
        rng = np.random.default_rng(1)
        q = er_quenched(7, 0.6, 3)
        spec = ModelSpec(motif, MU, 0.5, q)
        for _ in range(5):
            x = rng.uniform(-1, 1, 7)
            assert hamiltonian(spec, x) == pytest.approx(
                naive_hamiltonian(motif, q.entries, x), rel=1e-11, abs=1e-13
            )

    def test_block_path_matches_dense(self):
        rng = np.random.default_rng(2)
        spec_b = ModelSpec(K3, MU, 1.0, TRI, n=30)
        spec_d = ModelSpec(K3, MU, 1.0, CouplingMatrix(spec_b.Q))
        for _ in range(3):
            x = rng.choice([-1.0, 1.0], 30)
            assert hamiltonian(spec_b, x) == pytest.approx(
                hamiltonian(spec_d, x), rel=1e-12
            )

    def test_degenerate_small_n(self):
        spec = ModelSpec(K2, MU, 1.0, CouplingMatrix([[0.0]]))
        assert hamiltonian(spec, np.ones(1)) == 0.0


class TestLocalFields:
    def test_pair_motif_formula(self):
        rng = np.random.default_rng(3)
        q = er_quenched(9, 0.5, 4)
        spec = ModelSpec(K2, MU, 1.0, q)
        x = rng.choice([-1.0, 1.0], 9)
        expected = 2.0 * (q.entries @ x) / 9.0
        np.testing.assert_allclose(local_fields(spec, x), expected, atol=1e-13)

    def test_zero_configuration(self):
        spec = ModelSpec(K3, MU, 1.0, TRI, n=12)
        np.testing.assert_allclose(local_fields(spec, np.zeros(12)), 0.0)

    def test_inclusion_exclusion_vs_naive_n30(self):
        rng = np.random.default_rng(4)
        spec = ModelSpec(K3, MU, 1.0, TRI, n=30)
        x = rng.choice([-1.0, 1.0], 30)
        m = local_fields(spec, x)
        for i in (0, 13, 29):
            assert m[i] == pytest.approx(
                naive_local_field(K3, spec.Q, x, i), abs=1e-10
            )

    @pytest.mark.parametrize("motif", [K3, K12], ids=["K3", "K1_2"])
    def test_dense_vs_naive(self, motif):
        rng = np.random.default_rng(5)
        q = er_quenched(6, 0.7, 6)
        spec = ModelSpec(motif, MU, 1.0, q)
        x = rng.uniform(-1, 1, 6)
        m = local_fields(spec, x)
        for i in range(6):
            assert m[i] == pytest.approx(
                naive_local_field(motif, q.entries, x, i), rel=1e-11, abs=1e-13
            )

    def test_site_accessor(self):
        spec = ModelSpec(K2, MU, 1.0, complete_coupling(5))
        x = np.asarray([1.0, -1.0, 1.0, 1.0, -1.0])
        assert local_field(spec, x, 2) == pytest.approx(2.0 * (x.sum() - 1.0) / 5.0)
        with pytest.raises(ValueError):
            local_field(spec, x, 7)


class TestIdentity:
    def test_hamiltonian_stat_identity_exhaustive(self):
        # n^{-1} sum X_i m_i = v U_n on every configuration, n <= 10
        rng = np.random.default_rng(6)
        for motif, n in ((K2, 6), (K3, 5), (K12, 5)):
            a = rng.normal(size=(n, n))
            q = CouplingMatrix(np.triu(a, 1) + np.triu(a, 1).T)
            spec = ModelSpec(motif, MU, 0.8, q)
            for bits in itertools.product((-1.0, 1.0), repeat=n):
                x = np.asarray(bits)
                assert hamiltonian_stat(spec, x) == pytest.approx(
                    motif.v * hamiltonian(spec, x), rel=1e-11, abs=1e-13
                )

    def test_check_flag(self):
        spec = ModelSpec(K2, MU, 1.0, complete_coupling(6))
        hamiltonian_stat(spec, np.ones(6), check=True)


class TestContrast:
    def test_zero_weights(self):
        assert contrast(np.zeros(4), np.ones(4)) == 0.0

    def test_ones_reduce_to_magnetization(self):
        x = np.asarray([1.0, -1.0, 1.0, 1.0])
        assert contrast(np.ones(4), x) == pytest.approx(x.mean())

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            contrast(np.ones(3), np.ones(4))


class TestConditionals:
    def test_binary_heat_bath_probabilities(self):
        # exact conditional: P(+1) = (1 + tanh(theta m)) / 2
        spec = ModelSpec(K2, MU, 0.8, complete_coupling(3))
        for m in (-1.5, 0.0, 0.4, 2.0):
            pts, probs = site_conditional(spec, m)
            assert pts.tolist() == [-1.0, 1.0]
            assert probs.sum() == pytest.approx(1.0, abs=1e-14)
            assert probs[1] == pytest.approx(0.5 * (1 + math.tanh(0.8 * m)), abs=1e-13)

    def test_field_enters_through_tilt(self):
        spec = ModelSpec(K2, MU, 0.8, complete_coupling(3), B=0.3)
        _, probs = site_conditional(spec, 0.5)
        assert probs[1] == pytest.approx(0.5 * (1 + math.tanh(0.8 * 0.5 + 0.3)), abs=1e-13)


class TestGlauber:
    def test_replay_bit_for_bit(self):
        spec = ModelSpec(K2, MU, 1.0, ONE, n=64)
        a = sample_chain(spec, 40, 10, thin=1, seed=9)
        b = sample_chain(spec, 40, 10, thin=1, seed=9)
        assert a.rows == b.rows
        np.testing.assert_array_equal(a.final_x, b.final_x)

    def test_zero_coupling_independent_draws(self):
        # theta = 0: sites are i.i.d. mu_B draws; mean within 3 SE of alpha'(B)
        spec = ModelSpec(K2, MU, 0.0, ONE, n=400, B=0.4)
        tr = sample_chain(spec, 220, 20, thin=2, seed=21, stats=("mag",))
        mean, se = tr.summary["mag"]
        target = MU.tilt_mean(0.4)
        assert abs(mean - target) <= max(3 * se, 0.02)

    def test_row_count(self):
        spec = ModelSpec(K2, MU, 0.5, ONE, n=32)
        tr = sample_chain(spec, 100, 40, thin=5, seed=1)
        assert len(tr.rows) == (100 - 40) // 5

    def test_sequential_scan(self):
        spec = ModelSpec(K2, MU, 0.5, ONE, n=32)
        state = initial_state(spec, 3)
        glauber_sweep(state, scan="sequential")
        assert state.sweeps == 1
        with pytest.raises(ValueError):
            glauber_sweep(state, scan="diagonal")

    def test_block_sums_audit(self):
        spec = ModelSpec(K3, MU, 0.7, TRI, n=60)
        state = initial_state(spec, 5)
        for _ in range(120):  # crosses the audit boundary at 100 sweeps
            glauber_sweep(state)
        assert state.max_drift <= 1e-9

    def test_three_block_chain_runs(self):
        spec = ModelSpec(K3, MU, 2.0, TRI, n=90)
        tr = sample_chain(spec, 60, 20, thin=2, seed=11, stats=("mag", "ham"))
        assert len(tr.rows) == 20
        assert np.isfinite(tr.column("ham")).all()

    def test_curie_weiss_concentration(self):
        spec = ModelSpec(K2, MU, 1.0, ONE, n=800)
        tr = sample_chain(spec, 400, 150, thin=2, seed=2, stats=("abs_mag",))
        assert tr.summary["abs_mag"][0] == pytest.approx(0.9575, abs=0.02)


class TestMomentDiagnostics:
    def test_pm1_first_moment_is_one(self):
        spec = ModelSpec(K2, MU, 1.0, ONE, n=50)
        x = initial_state(spec, 1).x
        d = moment_diagnostics(spec, x)
        assert d[0] == pytest.approx(1.0)

    def test_zero_theta_conditional(self):
        spec = ModelSpec(K2, MU, 0.0, ONE, n=50)
        x = initial_state(spec, 1).x
        d = moment_diagnostics(spec, x)
        assert d[2] == pytest.approx(abs(MU.tilt_mean(0.0)) ** 2, abs=1e-13)

    def test_bounded_across_sizes(self):
        vals = []
        for n in (100, 200, 400):
            spec = ModelSpec(K2, MU, 1.0, ONE, n=n)
            tr = sample_chain(spec, 80, 30, thin=5, seed=4, stats=("moments",))
            vals.append(tr.summary["moment_m"][0])
        assert max(vals) <= 5.0
        assert max(vals) / min(vals) <= 1.5


class TestExactEnumeration:
    def test_zero_theta(self):
        spec = ModelSpec(K2, MU, 0.0, complete_coupling(6))
        res = exact_small_n(spec)
        assert res.z == pytest.approx(0.0, abs=1e-13)
        assert res.means["mag"] == pytest.approx(MU.tilt_mean(0.0), abs=1e-13)

    def test_degenerate_n1(self):
        spec = ModelSpec(K2, MU, 0.9, CouplingMatrix([[0.0]]))
        assert exact_small_n(spec).z == pytest.approx(0.0, abs=1e-14)

    def test_probabilities_sum(self):
        spec = ModelSpec(K2, MU, 0.7, complete_coupling(8))
        res = exact_small_n(spec)
        assert sum(p for _, p in res.u_law) == pytest.approx(1.0, abs=1e-12)

    def test_field_via_tilt(self):
        # B enters as mu_B only; at theta = 0 the model is a product tilt
        spec = ModelSpec(K2, MU, 0.0, complete_coupling(5), B=0.7)
        res = exact_small_n(spec)
        assert res.z == pytest.approx(0.0, abs=1e-13)
        assert res.means["mag"] == pytest.approx(math.tanh(0.7), abs=1e-12)

    def test_size_guard(self):
        spec = ModelSpec(K3, MU, 0.5, TRI, n=30)
        with pytest.raises(ValueError):
            exact_small_n(spec)


class TestStationarity:
    @pytest.mark.parametrize("theta", [0.0, 0.5, 1.0])
    def test_complete_three_sites(self, theta):
        spec = ModelSpec(K2, MU, theta, complete_coupling(3))
        assert exact_glauber_stationarity(spec) <= 1e-10

    def test_three_point_measure(self):
        spec = ModelSpec(K2, three_point(0.5), 0.8, complete_coupling(4))
        assert exact_glauber_stationarity(spec) <= 1e-8

    def test_triangle_motif(self):
        spec = ModelSpec(K3, MU, 0.6, TRI, n=6)
        assert exact_glauber_stationarity(spec) <= 1e-8


class TestPermutationInvariance:
    def test_identity_permutation(self):
        spec = ModelSpec(K2, MU, 0.5, complete_coupling(6))
        rep = permutation_invariance_check(spec, np.arange(6))
        assert rep.ok and rep.z_diff == 0.0

    def test_complete_coupling_any_permutation(self):
        spec = ModelSpec(K2, MU, 0.5, complete_coupling(6))
        rep = permutation_invariance_check(spec, np.random.default_rng(3).permutation(6))
        assert rep.ok

    def test_random_coupling_random_permutation(self):
        rng = np.random.default_rng(12)
        a = (rng.random((8, 8)) < 0.5).astype(float)
        q = CouplingMatrix(np.triu(a, 1) + np.triu(a, 1).T)
        spec = ModelSpec(K2, MU, 0.7, q)
        rep = permutation_invariance_check(spec, rng.permutation(8))
        assert rep.z_diff <= 1e-12
        assert rep.law_diff <= 1e-12

    def test_rejects_non_permutation(self):
        spec = ModelSpec(K2, MU, 0.5, complete_coupling(4))
        with pytest.raises(ValueError):
            permutation_invariance_check(spec, [0, 0, 1, 2])

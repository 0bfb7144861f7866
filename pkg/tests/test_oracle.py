"""Exact enumeration: distributions, kernels, detailed balance machinery."""

import math

import numpy as np
import pytest

from clusterflip import (
    BoundarySpec,
    IsingGraph,
    RngStream,
    build_square_lattice,
    exact_involution_for,
    random_interior_involution,
)
from clusterflip.oracle import (
    BalanceReport,
    EnumerationCapError,
    TransitionMatrix,
    check_detailed_balance,
    check_stationarity,
    double_flip_state_map,
    enumerate_joint_and_marginals,
    enumerate_pV,
    exact_flip_kernel,
    exact_sw_kernel,
    index_from_spins,
    mixture_kernel,
    rows_stochastic,
    spectral_gap,
    spins_from_index,
    state_energies,
)

SIDES = BoundarySpec("sides-pm")

# frozen from an independent direct-summation script run before this module
# was written: 2x2 sides-pm lattice at beta = 0.5
TWO_BY_TWO_P_ALL_MINUS = 0.2731751799446433
TWO_BY_TWO_P_H_MINUS4 = 0.0050033779492310668


class TestEncoding:
    def test_round_trip(self):
        for idx in range(16):
            assert index_from_spins(spins_from_index(idx, 4)) == idx

    def test_bit_convention(self):
        s = spins_from_index(0b0101, 4)
        assert list(s) == [1, -1, 1, -1]


class TestEnumeratePV:
    def test_two_state_analytic(self):
        g = IsingGraph(1, np.array([1, 1], dtype=np.int8), np.array([[0, 1], [0, 2]]))
        dist = enumerate_pV(g, 0.5)
        exact = math.e / (math.e + math.exp(-1.0))
        assert dist.weights[1] == pytest.approx(exact, abs=1e-14)

    def test_balanced_boundary_is_uniform(self):
        g = IsingGraph(1, np.array([1, -1], dtype=np.int8), np.array([[0, 1], [0, 2]]))
        for beta in (0.1, 0.7, 2.0):
            dist = enumerate_pV(g, beta)
            assert np.allclose(dist.weights, 0.5, atol=1e-14)

    def test_2x2_table_matches_independent_summation(self):
        g = build_square_lattice(2, 2, SIDES)
        dist = enumerate_pV(g, 0.5)
        # direct recomputation with explicit loops, no shared code paths
        weights = np.zeros(16)
        for idx in range(16):
            s = [1 if (idx >> i) & 1 else -1 for i in range(4)]
            full = s + list(g.boundary_spin)
            h = sum(full[int(u)] * full[int(v)] for u, v in g.edges)
            weights[idx] = math.exp(0.5 * h)
        weights /= weights.sum()
        assert np.abs(dist.weights - weights).max() < 1e-15
        assert dist.weights[0] == pytest.approx(TWO_BY_TWO_P_ALL_MINUS, abs=1e-15)
        assert dist.weights[6] == pytest.approx(TWO_BY_TWO_P_H_MINUS4, abs=1e-15)

    def test_energies_match_alignment_sum(self):
        from clusterflip import alignment_sum

        g = build_square_lattice(2, 3, SIDES)
        energies = state_energies(g)
        for idx in (0, 5, 17, 63):
            assert energies[idx] == alignment_sum(g, spins_from_index(idx, 6))

    def test_spin_cap(self):
        g = build_square_lattice(5, 5, SIDES)  # |I| = 25 > 20
        with pytest.raises(EnumerationCapError):
            enumerate_pV(g, 0.5)


class TestJointDistribution:
    def test_single_interior_edge_hand_enumeration(self):
        # two interior vertices, one edge, no boundary: 8 joint states, 6 nonzero
        g = IsingGraph(2, np.array([], dtype=np.int8), np.array([[0, 1]]))
        beta = 0.4
        q = math.exp(-2 * beta)
        z = 2 * (1 - q) + 4 * q
        p_ve, p_e, p_v = enumerate_joint_and_marginals(g, beta)
        expected = np.zeros((4, 2))
        for s_idx in range(4):
            aligned = ((s_idx & 1) == ((s_idx >> 1) & 1))
            expected[s_idx, 0] = q / z
            expected[s_idx, 1] = (1 - q) / z if aligned else 0.0
        assert np.abs(p_ve.weights - expected).max() < 1e-15
        assert np.count_nonzero(p_ve.weights) == 6

    def test_single_boundary_edge_has_three_nonzero_states(self):
        g = IsingGraph(1, np.array([1], dtype=np.int8), np.array([[0, 1]]))
        p_ve, p_e, p_v = enumerate_joint_and_marginals(g, 0.4)
        assert np.count_nonzero(p_ve.weights) == 3
        assert p_ve.weights[0, 1] == 0.0  # s = -1 cannot occupy the +1 boundary edge

    @pytest.mark.parametrize("beta", [0.2, 0.5, 1.0])
    def test_marginalization_identities_on_2x2(self, beta):
        g = build_square_lattice(2, 2, SIDES)
        p_ve, p_e, p_v = enumerate_joint_and_marginals(g, beta)
        assert np.abs(p_ve.weights.sum(axis=0) - p_e.weights).max() < 1e-12
        assert np.abs(p_ve.weights.sum(axis=1) - p_v.weights).max() < 1e-12

    def test_incompatible_edge_configs_have_zero_mass(self):
        # +1 and -1 boundary vertices chained through the interior
        g = IsingGraph(2, np.array([1, -1], dtype=np.int8),
                       np.array([[0, 1], [0, 2], [1, 3]]))
        p_ve, p_e, _ = enumerate_joint_and_marginals(g, 0.5)
        w_all = (1 << g.n_edges) - 1
        assert p_e.weights[w_all] == 0.0
        assert p_ve.weights[:, w_all].max() == 0.0

    def test_total_cap(self):
        g = build_square_lattice(4, 4, SIDES)  # 16 + 40 bits
        with pytest.raises(EnumerationCapError):
            enumerate_joint_and_marginals(g, 0.5)


class TestSwKernel:
    def test_beta_zero_resamples_uniformly(self):
        g = build_square_lattice(1, 2, SIDES)
        kernel = exact_sw_kernel(g, 0.0)
        assert np.allclose(kernel.matrix, 0.25, atol=1e-14)

    def test_rows_sum_to_one(self):
        g = build_square_lattice(2, 2, SIDES)
        kernel = exact_sw_kernel(g, 0.5)
        assert rows_stochastic(kernel)

    @pytest.mark.parametrize("beta", [0.2, 0.5, 1.0])
    def test_detailed_balance(self, beta):
        g = build_square_lattice(2, 2, SIDES)
        kernel = exact_sw_kernel(g, beta)
        report = check_detailed_balance(kernel, enumerate_pV(g, beta), 1e-10)
        assert report.passed, str(report)

    def test_stationarity(self):
        g = build_square_lattice(1, 3, SIDES)
        kernel = exact_sw_kernel(g, 0.5)
        assert check_stationarity(kernel, enumerate_pV(g, 0.5), 1e-10).passed


class TestFlipKernels:
    def test_exact_kind_is_permutation(self):
        g = build_square_lattice(2, 2, SIDES)
        m = exact_involution_for(g, "diagonal")
        kernel = exact_flip_kernel(g, 0.5, m, "exact")
        assert np.all(np.sort(kernel.matrix, axis=1)[:, -1] == 1.0)
        assert np.all(kernel.matrix.sum(axis=1) == 1.0)

    def test_metropolized_equals_exact_under_symmetry(self):
        g = build_square_lattice(2, 2, SIDES)
        m = exact_involution_for(g, "diagonal")
        exact = exact_flip_kernel(g, 0.5, m, "exact")
        metro = exact_flip_kernel(g, 0.5, m, "metropolized")
        assert np.array_equal(exact.matrix, metro.matrix)

    def test_metropolized_balances_with_bad_involution(self):
        g = build_square_lattice(2, 2, SIDES)
        m = random_interior_involution(g.n_interior, RngStream(41))
        kernel = exact_flip_kernel(g, 0.5, m, "metropolized")
        report = check_detailed_balance(kernel, enumerate_pV(g, 0.5), 1e-12)
        assert report.passed, str(report)

    def test_state_map_involution(self):
        m = random_interior_involution(5, RngStream(42))
        targets = double_flip_state_map(m, 5)
        assert np.array_equal(targets[targets], np.arange(32))

    def test_unknown_kind(self):
        g = build_square_lattice(1, 2, SIDES)
        with pytest.raises(ValueError):
            exact_flip_kernel(g, 0.5, np.arange(2), "glauber")


class TestMixtureAndChecks:
    def test_mixture_is_exact_linear_combination(self):
        g = build_square_lattice(2, 2, SIDES)
        m = exact_involution_for(g, "diagonal")
        p_sw = exact_sw_kernel(g, 0.5)
        p_df = exact_flip_kernel(g, 0.5, m, "exact")
        mix = mixture_kernel(0.3, p_df, p_sw)
        expected = 0.3 * p_df.matrix + 0.7 * p_sw.matrix
        assert np.abs(mix.matrix - expected).max() < 1e-14

    def test_asymmetric_kernel_fails_with_witness(self):
        g = build_square_lattice(1, 2, SIDES)
        p_v = enumerate_pV(g, 0.5)
        bad = np.array([
            [0.5, 0.5, 0.0, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.5, 0.5],
            [0.5, 0.0, 0.0, 0.5],
        ])
        report = check_detailed_balance(TransitionMatrix("bad", bad), p_v, 1e-10)
        assert not report.passed
        s, t = report.worst_pair
        assert s != t
        assert report.max_violation > 1e-3

    def test_fifty_randomized_reversibility_cases(self):
        rng = RngStream(2718)
        shapes = [(1, 2), (2, 2), (1, 3), (1, 4), (2, 3)]
        for case in range(50):
            n1, n2 = shapes[case % len(shapes)]
            beta = 0.1 + rng.uniform() * 1.4
            eta = 0.05 + rng.uniform() * 0.9
            g = build_square_lattice(n1, n2, SIDES)
            p_v = enumerate_pV(g, beta)
            p_sw = exact_sw_kernel(g, beta)
            m = random_interior_involution(g.n_interior, rng)
            p_df = exact_flip_kernel(g, beta, m, "metropolized")
            mix = mixture_kernel(eta, p_df, p_sw)
            for kernel in (p_sw, p_df, mix):
                assert rows_stochastic(kernel, tol=1e-10)
                assert check_detailed_balance(kernel, p_v, 1e-10).passed

    def test_spectral_gap_bounds_and_flip_speedup(self):
        g = build_square_lattice(2, 2, SIDES)
        m = exact_involution_for(g, "diagonal")
        p_v = enumerate_pV(g, 0.5)
        p_sw = exact_sw_kernel(g, 0.5)
        mix = mixture_kernel(0.3, exact_flip_kernel(g, 0.5, m, "exact"), p_sw)
        lam_sw = spectral_gap(p_sw, p_v)
        lam_mix = spectral_gap(mix, p_v)
        assert 0.0 <= lam_mix < 1.0
        assert 0.0 <= lam_sw < 1.0
        assert lam_mix < lam_sw  # the flip shortens correlation on this instance

    def test_balance_report_str(self):
        report = BalanceReport(False, 1.5e-3, (2, 7))
        assert "FAIL" in str(report) and "(2, 7)" in str(report)

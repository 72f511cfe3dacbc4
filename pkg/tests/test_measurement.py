"""Projective disentangling strategy and the optimal measurement bound."""

import numpy as np
import pytest

from disentanglers import (
    BlochQuadrature,
    DickeVector,
    DomainError,
    PureQubit,
    averaged_estimator,
    bloch_average,
    dilute_angle,
    dilution_overlap,
    estimator_output,
    measurement_avg_fidelity,
    measurement_outcomes,
    optimal_measurement_bound,
    optimal_measurement_bound_numeric,
    projector_pair,
    strategy_integral,
    symmetric_state,
)

QUAD = BlochQuadrature()


def random_dicke(rng, n):
    c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    c = c / np.linalg.norm(c)
    return DickeVector(n, c[0], c[1])


class TestProjectorPair:
    def test_polar_orientation(self):
        pair = projector_pair(0.0, 0.0, 4)
        assert np.allclose(pair.xi0.amplitudes(), [1.0, 0.0])
        assert np.allclose(pair.xi1.amplitudes(), [0.0, -1.0])

    def test_orthonormal(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            pair = projector_pair(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi),
                                  int(rng.integers(1, 12)))
            assert np.max(np.abs(pair.gram() - np.eye(2))) < 1e-12

    def test_aligned_input_is_deterministic(self):
        pair = projector_pair(np.pi / 2, 0.0, 3)
        big = DickeVector(3, np.cos(np.pi / 4), np.sin(np.pi / 4))
        assert abs(pair.xi0.overlap(big)) ** 2 == pytest.approx(1.0, abs=1e-14)


class TestMeasurementOutcomes:
    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            pair = projector_pair(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), 5)
            recs = measurement_outcomes(random_dicke(rng, 5), pair)
            assert recs[0].probability + recs[1].probability == pytest.approx(1.0)

    def test_prepared_states_orthogonal(self):
        pair = projector_pair(1.1, 2.3, 2)
        recs = measurement_outcomes(random_dicke(np.random.default_rng(1), 2), pair)
        ov = np.vdot(recs[0].prepared.amplitudes(), recs[1].prepared.amplitudes())
        assert abs(ov) < 1e-12


class TestEstimatorOutput:
    def test_polar_input_polar_apparatus(self):
        rho = estimator_output(DickeVector(4, 1.0, 0.0), projector_pair(0.0, 0.0, 4))
        assert np.allclose(rho.entries, np.diag([1.0, 0.0]), atol=1e-14)

    def test_deterministic_outcome(self):
        pair = projector_pair(0.9, 1.7, 6)
        rho = estimator_output(pair.xi0, pair)
        eta0 = pair.xi0.amplitudes()  # same two amplitudes as the prepared qubit
        assert np.allclose(rho.entries, np.outer(eta0, eta0.conj()), atol=1e-12)

    def test_spectral_structure(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(1, 9))
            pair = projector_pair(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), n)
            big = random_dicke(rng, n)
            rho = estimator_output(big, pair)
            recs = measurement_outcomes(big, pair)
            for rec in recs:
                v = rec.prepared.amplitudes()
                assert np.allclose(rho.entries @ v, rec.probability * v, atol=1e-12)


class TestAveragedEstimator:
    def test_polar_input(self):
        rho = averaged_estimator(DickeVector(5, 1.0, 0.0), QUAD)
        assert np.allclose(rho.entries, np.diag([2 / 3, 1 / 3]), atol=1e-13)

    def test_equatorial_input(self):
        big = DickeVector(3, np.cos(np.pi / 4), np.sin(np.pi / 4))
        rho = averaged_estimator(big, QUAD)
        assert np.allclose(rho.entries, [[0.5, 1 / 6], [1 / 6, 0.5]], atol=1e-13)

    def test_matches_closed_form_for_random_inputs(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            n = int(rng.integers(1, 11))
            big = random_dicke(rng, n)
            rho = averaged_estimator(big, QUAD)  # self-checks against closed form
            psi = big.amplitudes()
            expected = np.outer(psi, psi.conj()) / 3 + np.eye(2) / 3
            assert np.max(np.abs(rho.entries - expected)) < 1e-8
            assert np.trace(rho.entries).real == pytest.approx(1.0, abs=1e-12)


class TestOverlapAndAverageFidelity:
    def test_endpoints(self):
        assert dilution_overlap(1) == 1.0
        assert dilution_overlap(2) == pytest.approx(0.9804911966047682, abs=1e-12)
        assert abs(dilution_overlap(10 ** 6) - 0.5) < 2e-3
        assert measurement_avg_fidelity(1) == pytest.approx(2 / 3, abs=1e-15)
        assert measurement_avg_fidelity(2) == pytest.approx(0.6601637322015894,
                                                            abs=1e-12)
        assert abs(measurement_avg_fidelity(10 ** 6) - 0.5) < 1e-3

    @pytest.mark.parametrize("n", [2, 3, 5, 10, 25, 50])
    def test_overlap_closed_form_vs_quadrature(self, n):
        def overlap_sq(th, ph):
            tb = dilute_angle(th, n)
            return np.cos((th - tb) / 2) ** 2

        assert abs(dilution_overlap(n) - bloch_average(overlap_sq, QUAD)) < 1e-9


class TestStrategyIntegral:
    def test_polynomial_value_n1(self):
        got = strategy_integral(0, 0.0, 0.0, 0.0, 0.0, 1, QUAD)
        assert got == pytest.approx(1 / 3, abs=1e-12)

    def test_branches_bounded_by_one(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            n = int(rng.integers(1, 9))
            tm, pm = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
            tp, pp = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
            total = (strategy_integral(0, tp, pp, tm, pm, n, QUAD)
                     + strategy_integral(1, tp, pp, tm, pm, n, QUAD))
            assert total <= 1.0 + 1e-12

    def test_alignment_beats_antipode(self):
        for tm in np.linspace(0.1, np.pi - 0.1, 12):
            aligned = strategy_integral(0, tm, 0.0, tm, 0.0, 2, QUAD)
            antipodal = strategy_integral(0, np.pi - tm, np.pi, tm, 0.0, 2, QUAD)
            assert aligned >= antipodal - 1e-12

    def test_azimuthal_translation_invariance(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            tp, pp = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
            tm, pm = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
            shift = rng.uniform(0, 2 * np.pi)
            for j in (0, 1):
                a = strategy_integral(j, tp, pp, tm, pm, 3, QUAD)
                b = strategy_integral(j, tp, pp + shift, tm, pm + shift, 3, QUAD)
                assert a == pytest.approx(b, abs=1e-13)

    def test_vectorized_matches_scalar(self):
        grid = np.linspace(0, np.pi, 7)
        vec = strategy_integral(0, grid, 0.3, 1.0, 0.0, 4, QUAD)
        for t, v in zip(grid, vec):
            assert strategy_integral(0, float(t), 0.3, 1.0, 0.0, 4, QUAD) == \
                pytest.approx(v, abs=1e-15)


class TestOptimalBound:
    def test_endpoints(self):
        assert optimal_measurement_bound(1) == pytest.approx(2 / 3, abs=1e-15)
        assert optimal_measurement_bound(2) == pytest.approx(0.6608040566225483,
                                                             abs=1e-12)
        assert abs(optimal_measurement_bound(10 ** 6) - 0.5) < 1e-3

    def test_dominates_projective_strategy(self):
        for n in range(2, 51):
            assert measurement_avg_fidelity(n) < optimal_measurement_bound(n)

    def test_numeric_matches_closed_form(self):
        for n in (1, 2):
            got = optimal_measurement_bound_numeric(n)
            assert got == pytest.approx(optimal_measurement_bound(n), abs=1e-3)

    def test_numeric_dominates_projective(self):
        for n in (2, 5, 10):
            assert (optimal_measurement_bound_numeric(n)
                    >= measurement_avg_fidelity(n) - 1e-6)

    def test_resolution_validated(self):
        with pytest.raises(DomainError):
            optimal_measurement_bound_numeric(2, resolution=16)

    def test_inner_supremum_covers_full_plane(self):
        # the two-azimuth reduction must dominate a coarse 2-D scan
        n, tm = 3, 1.2
        tgrid = np.linspace(0, np.pi, 16)
        pgrid = np.linspace(0, 2 * np.pi, 16, endpoint=False)
        tt, pp = np.meshgrid(tgrid, pgrid, indexing="ij")
        scan0 = float(np.max(strategy_integral(0, tt, pp, tm, 0.0, n, QUAD)))
        best0 = max(float(np.max(strategy_integral(0, tgrid, dphi, tm, 0.0, n, QUAD)))
                    for dphi in (0.0, np.pi))
        assert best0 >= scan0 - 1e-12


class TestSymmetricStateConsistency:
    def test_projector_alignment_with_dilution(self):
        # measuring along the diluted orientation always fires outcome 0
        psi = PureQubit(0.7, 1.9)
        big = symmetric_state(psi, 6)
        tbar = dilute_angle(psi.theta, 6)
        pair = projector_pair(tbar, psi.phi, 6)
        assert abs(pair.xi0.overlap(big)) ** 2 == pytest.approx(1.0, abs=1e-12)

"""State representations, dilution map, partial traces, and quadrature."""

import numpy as np
import pytest

from disentanglers import (
    BlochQuadrature,
    CapacityError,
    DensityOperator,
    DickeVector,
    DomainError,
    FullStateVector,
    PureQubit,
    bloch_average,
    dicke_to_statevector,
    dilute_angle,
    diluted_avg_fidelity,
    fidelity_pure,
    reduced_qubit,
    symmetric_marginal,
    symmetric_state,
)

QUAD = BlochQuadrature()


def random_qubit(rng):
    return PureQubit(float(rng.uniform(0, np.pi)), float(rng.uniform(0, 2 * np.pi)))


class TestPureQubit:
    def test_amplitudes_normalized(self):
        psi = PureQubit(1.234, 5.0)
        assert abs(abs(psi.alpha) ** 2 + abs(psi.beta) ** 2 - 1.0) < 1e-12

    @pytest.mark.parametrize("theta,phi", [(-0.1, 0.0), (np.pi + 0.1, 0.0),
                                           (1.0, -0.5), (1.0, 2 * np.pi)])
    def test_range_validation(self, theta, phi):
        with pytest.raises(DomainError):
            PureQubit(theta, phi)

    def test_from_amplitudes_roundtrip(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            psi = random_qubit(rng)
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            back = PureQubit.from_amplitudes(phase * psi.amplitudes())
            overlap = abs(np.vdot(psi.amplitudes(), back.amplitudes())) ** 2
            assert overlap == pytest.approx(1.0, abs=1e-12)


class TestDiluteAngle:
    def test_poles_fixed(self):
        for n in (1, 2, 7, 100):
            assert dilute_angle(0.0, n) == 0.0
            assert dilute_angle(np.pi, n) == pytest.approx(np.pi, abs=1e-12)

    def test_equator_n4(self):
        # cos(out/2) = 2/sqrt(5)
        assert dilute_angle(np.pi / 2, 4) == pytest.approx(0.9272952180016123,
                                                           abs=1e-12)

    def test_monotone(self):
        grid = np.linspace(0.0, np.pi, 1000)
        for n in (1, 2, 3, 5, 17):
            out = dilute_angle(grid, n)
            assert np.all(np.diff(out) >= -1e-14)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            dilute_angle(-0.01, 3)
        with pytest.raises(DomainError):
            dilute_angle(1.0, 0)


class TestSymmetricState:
    def test_poles(self):
        up = symmetric_state(PureQubit(0.0, 0.0), 5)
        assert (up.c0, up.c1) == (1.0, 0.0)
        down = symmetric_state(PureQubit(np.pi, 0.0), 5)
        assert abs(down.c0) < 1e-12 and abs(down.c1 - 1.0) < 1e-12

    def test_equator_n4(self):
        v = symmetric_state(PureQubit(np.pi / 2, 0.0), 4)
        assert v.c0 == pytest.approx(0.8944271909999159, abs=1e-12)
        assert v.c1 == pytest.approx(0.4472135954999579, abs=1e-12)

    def test_identity_at_n1(self):
        psi = PureQubit(0.8, 2.5)
        v = symmetric_state(psi, 1)
        assert v.c0 == pytest.approx(psi.alpha, abs=1e-14)
        assert v.c1 == pytest.approx(psi.beta, abs=1e-14)

    def test_dicke_normalization_enforced(self):
        with pytest.raises(DomainError):
            DickeVector(3, 0.9, 0.9)
        with pytest.raises(DomainError):
            DickeVector(0, 1.0, 0.0)


class TestDickeToStatevector:
    def test_n2_basis(self):
        assert np.allclose(dicke_to_statevector(DickeVector(2, 1.0, 0.0)).amps,
                           [1, 0, 0, 0])
        assert np.allclose(dicke_to_statevector(DickeVector(2, 0.0, 1.0)).amps,
                           [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0])

    def test_n3_expansion(self):
        sv = dicke_to_statevector(DickeVector(3, 0.6, 0.8))
        expected = np.zeros(8, dtype=complex)
        expected[0] = 0.6
        expected[[1, 2, 4]] = 0.8 / np.sqrt(3)
        assert np.allclose(sv.amps, expected, atol=1e-15)
        assert np.linalg.norm(sv.amps) == pytest.approx(1.0, abs=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        for n in range(2, 9):
            c0 = rng.standard_normal() + 1j * rng.standard_normal()
            c1 = rng.standard_normal() + 1j * rng.standard_normal()
            norm = np.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
            sv = dicke_to_statevector(DickeVector(n, c0 / norm, c1 / norm))
            tensor = sv.amps.reshape((2,) * n)
            for i in range(n):
                for j in range(i + 1, n):
                    swapped = np.swapaxes(tensor, i, j)
                    assert np.array_equal(swapped, tensor)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            dicke_to_statevector(DickeVector(25, 1.0, 0.0))
        with pytest.raises(CapacityError):
            FullStateVector(25, np.zeros(2 ** 25))


class TestReducedQubit:
    def test_all_zeros(self):
        rho = reduced_qubit(dicke_to_statevector(DickeVector(2, 1.0, 0.0)), 1)
        assert np.allclose(rho.entries, np.diag([1.0, 0.0]))

    def test_equal_amplitudes_n2(self):
        v = DickeVector(2, 1 / np.sqrt(2), 1 / np.sqrt(2))
        rho = reduced_qubit(dicke_to_statevector(v), 2)
        off = 0.35355339059327373  # 1 / (2 sqrt(2))
        assert np.allclose(rho.entries, [[0.75, off], [off, 0.25]], atol=1e-14)

    def test_matches_closed_form_marginal(self):
        rng = np.random.default_rng(7)
        for n in (1, 2, 3, 5, 8, 12):
            for _ in range(5):
                v = symmetric_state(random_qubit(rng), n)
                brute = reduced_qubit(dicke_to_statevector(v), 1)
                closed = symmetric_marginal(v)
                assert np.max(np.abs(brute.entries - closed.entries)) < 1e-12

    def test_index_independence(self):
        v = symmetric_state(PureQubit(1.1, 0.4), 5)
        sv = dicke_to_statevector(v)
        first = reduced_qubit(sv, 1).entries
        for which in range(2, 6):
            assert np.allclose(reduced_qubit(sv, which).entries, first, atol=1e-14)

    def test_index_errors(self):
        sv = dicke_to_statevector(DickeVector(3, 1.0, 0.0))
        for bad in (0, 4, -1):
            with pytest.raises(DomainError):
                reduced_qubit(sv, bad)

    def test_invariants_on_random_states(self):
        # output must always be a valid density operator (checked on build)
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            n = int(rng.integers(1, 7))
            amps = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
            sv = FullStateVector(n, amps / np.linalg.norm(amps))
            rho = reduced_qubit(sv, int(rng.integers(1, n + 1)))
            assert rho.dim == 2


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            DensityOperator(2, np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(DomainError):
            DensityOperator(2, np.diag([0.7, 0.7]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(DomainError):
            DensityOperator(2, np.diag([1.5, -0.5]))


class TestFidelityPure:
    def test_projector(self):
        psi = PureQubit(0.0, 0.0)
        rho = DensityOperator(2, np.diag([1.0, 0.0]))
        assert fidelity_pure(psi, rho) == pytest.approx(1.0, abs=1e-15)

    def test_maximally_mixed(self):
        assert fidelity_pure(PureQubit(0.0, 0.0),
                             DensityOperator(2, np.eye(2) / 2)) == pytest.approx(0.5)

    def test_estimator_value_n1(self):
        # equatorial qubit against (|psi><psi| + I) / 3
        psi = PureQubit(np.pi / 2, 0.0)
        rho = DensityOperator(2, np.array([[0.5, 1 / 6], [1 / 6, 0.5]]))
        assert fidelity_pure(psi, rho) == pytest.approx(2 / 3, abs=1e-14)

    def test_dimension_mismatch(self):
        rho4 = DensityOperator(4, np.eye(4) / 4)
        with pytest.raises(DomainError):
            fidelity_pure(PureQubit(1.0, 1.0), rho4)


class TestBlochQuadrature:
    def test_weights_normalized(self):
        q = BlochQuadrature(16, 8)
        _, _, w = q.grid()
        assert np.sum(w) == pytest.approx(1.0, abs=1e-13)

    def test_node_counts_validated(self):
        with pytest.raises(DomainError):
            BlochQuadrature(1, 8)

    def test_constant(self):
        assert bloch_average(lambda th, ph: 1.0, QUAD) == pytest.approx(1.0,
                                                                        abs=1e-13)

    def test_half_angle_square(self):
        got = bloch_average(lambda th, ph: np.cos(th / 2) ** 2, QUAD)
        assert got == pytest.approx(0.5, abs=1e-13)

    def test_overlap_average_n2(self):
        def overlap_sq(th, ph):
            tb = dilute_angle(th, 2)
            return np.cos((th - tb) / 2) ** 2

        assert bloch_average(overlap_sq, QUAD) == pytest.approx(
            0.9804911966047682, abs=1e-9)


class TestDilutedAvgFidelity:
    def test_endpoints(self):
        assert diluted_avg_fidelity(1) == 1.0
        assert diluted_avg_fidelity(2) == pytest.approx(0.8068528194400547,
                                                        abs=1e-12)
        assert abs(diluted_avg_fidelity(10 ** 6) - 0.5) < 1e-4

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 12])
    def test_matches_full_pipeline_average(self, n):
        # brute-force route: statevector, partial trace, pointwise fidelity
        def pipeline(theta, phi):
            psi = PureQubit.from_angles(theta, phi)
            sv = dicke_to_statevector(symmetric_state(psi, n))
            return fidelity_pure(psi, reduced_qubit(sv, 1))

        quad = BlochQuadrature(64, 8)
        got = bloch_average(np.vectorize(pipeline), quad)
        assert got == pytest.approx(diluted_avg_fidelity(n), abs=1e-9)

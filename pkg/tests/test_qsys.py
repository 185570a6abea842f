import numpy as np
import pytest

from qsingpert.errors import (
    DimensionError, InconsistentWitnessError, InvalidParameterError, PoleProximityError,
)
from qsingpert.linalg import dag, norm
from qsingpert.qsys import (
    FrequencyGrid, LBRVerdict, MinimalityVerdict, PhysicalRealization, QuantumLinearSystem,
    find_commutation_matrix, frequency_response, lossless_bounded_real_check, minimality_check,
    realize_from_physical, recover_physical, response_skipping_poles, unitarity_defect,
)
from qsingpert.sampling import random_physical_realization, random_unitary


def single_cavity(kappa):
    s = np.sqrt(kappa)
    return QuantumLinearSystem([[-kappa / 2]], [[-s]], [[s]], [[1.0]])


def oscillator():
    return QuantumLinearSystem([[0, 1], [-1, 0]], np.zeros((2, 2)), np.zeros((2, 2)), -np.eye(2))


class TestSystem:
    def test_dimensions(self):
        with pytest.raises(DimensionError):
            QuantumLinearSystem(np.eye(2), np.ones((2, 1)), np.ones((1, 3)), np.eye(1))

    def test_immutable(self):
        sys = single_cavity(1.0)
        with pytest.raises(ValueError):
            sys.F[0, 0] = 3

    def test_transformed(self):
        sys = single_cavity(2.0).transformed([[2.0]])
        np.testing.assert_allclose(sys.G, [[-2 * np.sqrt(2)]])
        np.testing.assert_allclose(sys.H, [[np.sqrt(2) / 2]])


class TestRealize:
    def test_single_cavity(self):
        sys = realize_from_physical(PhysicalRealization([[1.0]], [[1.0]], [[1.0]], [[0.0]]))
        np.testing.assert_allclose(sys.F, [[-0.5]])
        np.testing.assert_allclose(sys.G, [[-1.0]])
        np.testing.assert_allclose(sys.H, [[1.0]])

    def test_detuned_cavity(self):
        sys = realize_from_physical(PhysicalRealization([[1.0]], [[1.0]], [[np.sqrt(2)]], [[3.0]]))
        np.testing.assert_allclose(sys.F, [[-1 - 3j]])

    def test_rejects_non_unitary_scattering(self):
        with pytest.raises(InvalidParameterError):
            realize_from_physical(PhysicalRealization([[1.0]], [[2.0]], [[1.0]], [[0.0]]))

    def test_rejects_indefinite_theta(self):
        with pytest.raises(InvalidParameterError):
            realize_from_physical(PhysicalRealization([[-1.0]], [[1.0]], [[1.0]], [[0.0]]))


class TestCommutation:
    def test_single_cavity(self):
        report = find_commutation_matrix(single_cavity(2.0))
        assert report.realizable and report.method == "lyapunov"
        np.testing.assert_allclose(report.theta, [[1.0]], atol=1e-12)
        np.testing.assert_allclose(report.witness.M, [[0.0]], atol=1e-12)

    def test_non_unitary_feedthrough(self):
        sys = QuantumLinearSystem(-np.eye(2), np.eye(2), np.eye(2), 2 * np.eye(2))
        report = find_commutation_matrix(sys)
        assert not report.realizable
        assert "K not unitary" in report.failure_reason

    def test_wrong_coupling_sign(self):
        report = find_commutation_matrix(QuantumLinearSystem([[-0.5]], [[1.0]], [[1.0]], [[1.0]]))
        assert not report.realizable
        assert "coupling" in report.failure_reason

    def test_oscillator_falls_back(self):
        report = find_commutation_matrix(oscillator())
        assert report.method == "least_squares"
        assert report.realizable
        assert np.min(np.linalg.eigvalsh(report.theta)) > 0

    def test_round_trip_recovers_theta(self, rng):
        p = random_physical_realization(rng, 3, 2)
        report = find_commutation_matrix(realize_from_physical(p))
        assert report.realizable
        np.testing.assert_allclose(report.theta, p.Theta, atol=1e-8 * norm(p.Theta))
        np.testing.assert_allclose(report.witness.M, p.M, atol=1e-8 * (1 + norm(p.M)))


class TestRecover:
    def test_inconsistent_witness(self):
        with pytest.raises(InconsistentWitnessError):
            recover_physical(single_cavity(1.0), [[2.0]])

    def test_indefinite_witness(self):
        with pytest.raises(InvalidParameterError):
            recover_physical(single_cavity(1.0), [[-1.0]])

    def test_shape(self):
        with pytest.raises(DimensionError):
            recover_physical(single_cavity(1.0), np.eye(2))


class TestFrequencyResponse:
    def test_default_grid(self):
        w = FrequencyGrid.default().omegas
        assert len(w) == 401 and w[0] == -1e3 and w[-1] == 1e3 and 0.0 in w

    def test_scalar_oracle(self):
        kappa = 0.5
        grid = FrequencyGrid.log_band(1e-2, 1e2, 50)
        phi = frequency_response(single_cavity(kappa), grid)[:, 0, 0]
        w = grid.omegas
        # all-pass: (i w - kappa/2) / (i w + kappa/2)
        np.testing.assert_allclose(phi, (1j * w - kappa / 2) / (1j * w + kappa / 2), atol=1e-13)

    def test_pole_on_axis(self):
        with pytest.raises(PoleProximityError) as info:
            frequency_response(oscillator(), FrequencyGrid([1.0]))
        assert info.value.omega == 1.0

    def test_skipping(self):
        used, resp, skipped = response_skipping_poles(oscillator(), FrequencyGrid([-1.0, 0.0, 1.0, 2.0]))
        assert skipped == [-1.0, 1.0]
        np.testing.assert_allclose(resp, np.broadcast_to(-np.eye(2), (2, 2, 2)))

    def test_unitarity_defect_vectorized(self):
        U = random_unitary(np.random.default_rng(1), 3)
        stack = np.stack([U, 2 * U])
        np.testing.assert_allclose(unitarity_defect(stack), [0.0, 3.0], atol=1e-12)


class TestLossless:
    def test_cavity(self):
        report = lossless_bounded_real_check(single_cavity(2.0))
        assert report.verdict is LBRVerdict.LOSSLESS_BR
        assert report.max_unitarity_defect <= 1e-12

    def test_oscillator_marginal(self):
        report = lossless_bounded_real_check(oscillator())
        assert report.verdict is LBRVerdict.MARGINAL
        assert report.closed_left_half_plane

    def test_unstable(self):
        sys = QuantumLinearSystem([[0.5]], [[1.0]], [[1.0]], [[1.0]])
        assert lossless_bounded_real_check(sys).verdict is LBRVerdict.FAILS_HURWITZ

    def test_lossy(self):
        # stable but the output carries only part of the input
        sys = QuantumLinearSystem([[-1.0]], [[1.0]], [[1.0]], [[0.5]])
        assert lossless_bounded_real_check(sys).verdict is LBRVerdict.FAILS_UNITARITY


class TestMinimality:
    def test_cavity(self):
        assert minimality_check(single_cavity(1.0)).verdict is MinimalityVerdict.MINIMAL

    def test_oscillator(self):
        report = minimality_check(oscillator())
        assert report.verdict is MinimalityVerdict.BOTH
        assert sorted(z.imag for z in report.uncontrollable_eigenvalues) == pytest.approx([-1, 1])

    def test_uncontrollable_only(self):
        sys = QuantumLinearSystem(np.diag([-1.0, -2.0]), [[1.0], [0.0]], [[1.0, 1.0]], [[1.0]])
        report = minimality_check(sys)
        assert report.verdict is MinimalityVerdict.UNCONTROLLABLE
        assert report.uncontrollable_eigenvalues == [pytest.approx(-2.0)]

    def test_unobservable_only(self):
        sys = QuantumLinearSystem(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 0.0]], [[1.0]])
        assert minimality_check(sys).verdict is MinimalityVerdict.UNOBSERVABLE

    def test_unitary_similarity(self, rng):
        sys = QuantumLinearSystem(np.diag([-1.0, -2.0, -3.0]), [[1.0], [0.0], [1.0]],
                                  [[1.0, 1.0, 0.0]], [[1.0]])
        U = random_unitary(rng, 3)
        assert minimality_check(sys.transformed(U)).verdict is minimality_check(sys).verdict

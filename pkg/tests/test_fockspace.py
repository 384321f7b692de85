"""Tests for Fock-space states, displacement and the shared value types."""

import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import poisson

from config.settings import NUMERICS_SETTINGS
from src.numerics.base_numerics import (
    CutoffMismatchError,
    DensityMatrix,
    DomainError,
    IntegrityError,
    PhotocountDistribution,
    TruncationError,
    total_variation,
)
from src.numerics.fockspace import (
    clamp_probabilities,
    coherent_density,
    coherent_state,
    conjugate_by,
    cutoff_for_amplitude,
    cutoff_for_thermal,
    density_from_pure,
    displaced_number_distribution,
    displacement_operator,
    effective_support,
    fock_density,
    fock_state,
    mean_amplitude,
    mean_photon_number,
    number_distribution,
    thermal_state,
)


def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), k=1)


# =============================================================================
# CUTOFFS AND CONSTRUCTORS
# =============================================================================

def test_cutoff_heuristics():
    assert cutoff_for_amplitude(0.0) == 10
    assert cutoff_for_amplitude(2.0) == math.ceil(4 + 6 * math.sqrt(5) + 4)
    assert cutoff_for_thermal(0.0) == 1
    assert cutoff_for_thermal(1.0) == math.ceil(math.log(1e-8) / math.log(0.5)) + 1


def test_fock_state_is_a_basis_vector():
    psi = fock_state(2, 5)
    np.testing.assert_array_equal(psi.amplitudes, [0, 0, 1, 0, 0])


@pytest.mark.parametrize("n", [-1, 5])
def test_fock_state_outside_basis(n):
    with pytest.raises(DomainError):
        fock_state(n, 5)


def test_coherent_vacuum_population():
    psi = coherent_state(1.0, 20)
    assert abs(psi.amplitudes[0]) ** 2 == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert psi.norm2 == pytest.approx(1.0, abs=1e-12)


def test_coherent_state_too_small_cutoff():
    with pytest.raises(TruncationError):
        coherent_state(3.0, 8)


def test_thermal_state():
    rho = thermal_state(1.0, 40)
    assert rho.elements[0, 0].real == pytest.approx(0.5)
    assert mean_photon_number(rho) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(TruncationError):
        thermal_state(1.0, 5)
    with pytest.raises(DomainError):
        thermal_state(-0.1, 10)


def test_doubling_cutoff_never_loses_trace():
    base = cutoff_for_thermal(2.0)
    traces = [thermal_state(2.0, base * 2 ** i).trace for i in range(3)]
    assert np.all(np.diff(traces) >= -1e-15)
    base = cutoff_for_amplitude(1.5)
    norms = [coherent_state(1.5, base * 2 ** i).norm2 for i in range(3)]
    assert np.all(np.diff(norms) >= -1e-15)
    assert all(1.0 - 1e-8 <= value <= 1.0 + 1e-12 for value in traces + norms)


def test_pure_density_is_a_projector():
    rho = density_from_pure(coherent_state(0.8 + 0.3j, 30)).elements
    np.testing.assert_allclose(rho @ rho, rho, atol=1e-12)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


# =============================================================================
# DISPLACEMENT
# =============================================================================

def test_displacement_matches_matrix_exponential():
    delta, dim, big = 0.7 + 0.4j, 20, 80
    a = _ladder(big)
    exact = expm(delta * a.conj().T - np.conj(delta) * a)[:dim, :dim]
    np.testing.assert_allclose(displacement_operator(delta, dim).elements, exact, atol=1e-10)


def test_reverse_displacement_is_adjoint():
    delta = 0.7 + 0.4j
    forward = displacement_operator(delta, 30)
    np.testing.assert_allclose(displacement_operator(-delta, 30).elements, forward.adjoint.elements, atol=1e-12)


def test_displacement_round_trip_is_identity_on_lower_levels():
    delta, dim = 0.6 + 0.8j, 60
    product = (displacement_operator(delta, dim) @ displacement_operator(-delta, dim)).elements
    low = dim // 2 + 1
    np.testing.assert_allclose(product[:low, :low], np.eye(low), atol=10 * NUMERICS_SETTINGS["truncation_tol"])


def test_conjugating_by_identity(superposition):
    conjugated = conjugate_by(superposition, displacement_operator(0.0, 12))
    np.testing.assert_allclose(conjugated.elements, superposition.elements, atol=1e-14)


def test_conjugating_vacuum_gives_coherent_state():
    delta = 0.8 - 0.5j
    conjugated = conjugate_by(fock_density(0, 30), displacement_operator(delta, 30))
    np.testing.assert_allclose(conjugated.elements, coherent_density(delta, 30).elements, atol=1e-8)


def test_conjugation_keeps_spectrum():
    rho = thermal_state(0.3, 60)
    conjugated = conjugate_by(rho, displacement_operator(1.0, 60))
    np.testing.assert_allclose(
        np.linalg.eigvalsh(conjugated.elements), np.sort(rho.diagonal()), atol=1e-10
    )
    assert conjugated.trace == pytest.approx(rho.trace, abs=1e-8)


def test_conjugation_refuses_to_lose_trace():
    # D(2) pushes a large share of |alpha=1> past 12 levels
    with pytest.raises(TruncationError):
        conjugate_by(coherent_density(1.0, 12), displacement_operator(2.0, 12))


def test_conjugation_needs_shared_cutoff(vacuum):
    with pytest.raises(CutoffMismatchError):
        conjugate_by(vacuum, displacement_operator(0.1, 8))


def test_displacement_first_column_is_coherent_state():
    delta = -0.5 + 0.8j
    column = displacement_operator(delta, 16).elements[:, 0]
    np.testing.assert_allclose(column, coherent_state(delta, 16).amplitudes, atol=1e-13)


def test_displacing_vacuum_gives_poisson_statistics():
    p = displaced_number_distribution(fock_density(0, 10), 1.5)
    n = np.arange(len(p))
    np.testing.assert_allclose(p.p, poisson.pmf(n, 2.25), atol=1e-12)
    assert p.total == pytest.approx(1.0, abs=1e-8)


def test_displacing_coherent_state_back_to_vacuum():
    alpha = 1.0 + 0.5j
    p = displaced_number_distribution(coherent_density(alpha, 24), -alpha)
    assert p.p[0] == pytest.approx(1.0, abs=1e-8)


def test_zero_displacement_is_number_distribution(single_photon):
    p = displaced_number_distribution(single_photon, 0.0)
    np.testing.assert_array_equal(p.p, number_distribution(single_photon).p)


def test_displacement_padding_limit(mocker):
    mocker.patch.dict(NUMERICS_SETTINGS, {"max_internal_dim": 16})
    with pytest.raises(TruncationError):
        displaced_number_distribution(fock_density(0, 10), 5.0)


# =============================================================================
# MOMENTS AND CLAMPING
# =============================================================================

def test_moments():
    alpha = 0.8 - 0.3j
    rho = coherent_density(alpha, 20)
    assert mean_amplitude(rho) == pytest.approx(alpha, abs=1e-10)
    assert mean_photon_number(rho) == pytest.approx(abs(alpha) ** 2, abs=1e-10)
    assert mean_photon_number(thermal_state(0.5, 30)) == pytest.approx(0.5, abs=1e-9)
    assert effective_support(fock_density(3, 8)) == 3


def test_clamp_probabilities():
    np.testing.assert_array_equal(clamp_probabilities(np.array([-1e-12, 1.0])), [0.0, 1.0])
    with pytest.raises(IntegrityError):
        clamp_probabilities(np.array([-1e-6, 1.0]))


# =============================================================================
# VALUE TYPES
# =============================================================================

def test_density_matrix_rejects_non_hermitian():
    with pytest.raises(IntegrityError):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))


def test_density_matrix_symmetrizes_rounding():
    rho = DensityMatrix(np.array([[0.5, 0.1 + 1e-14], [0.1, 0.5]]))
    assert rho.elements[0, 1] == rho.elements[1, 0]


def test_cutoff_mismatch():
    with pytest.raises(CutoffMismatchError):
        displacement_operator(0.1, 8) @ displacement_operator(0.1, 9)


def test_photocount_distribution_validation():
    with pytest.raises(IntegrityError):
        PhotocountDistribution([0.5, -0.1])
    with pytest.raises(IntegrityError):
        PhotocountDistribution([0.5, np.nan])
    with pytest.raises(IntegrityError):
        PhotocountDistribution([])


def test_total_variation_pads_shorter_vector():
    p = PhotocountDistribution([0.5, 0.5])
    q = PhotocountDistribution([0.5, 0.25, 0.25])
    assert total_variation(p, q) == pytest.approx(0.25)

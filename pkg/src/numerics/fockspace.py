"""
🔢 Fock Space
=============

Truncated Fock-space linear algebra: state constructors, displacement
operators, density-matrix utilities and photon-number statistics.

Truncation never renormalizes silently: a constructor whose result has
norm below ``1 - truncation_tol`` raises TruncationError.
"""

import math
import os
import sys
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln, xlogy

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from config.settings import NUMERICS_SETTINGS
from src.numerics.base_numerics import (
    CutoffLike,
    DensityMatrix,
    DomainError,
    IntegrityError,
    Operator,
    PhotocountDistribution,
    StateVector,
    TruncationError,
    as_cutoff,
    check_same_cutoff,
)


# =============================================================================
# CUTOFF HEURISTICS
# =============================================================================

def cutoff_for_amplitude(alpha: complex) -> int:
    """Smallest dimension whose Poisson tail for |alpha|^2 is below ~1e-8."""
    mean = abs(alpha) ** 2
    sigmas = NUMERICS_SETTINGS["cutoff_sigmas"]
    return int(math.ceil(mean + sigmas * math.sqrt(mean + 1) + NUMERICS_SETTINGS["cutoff_offset"]))


def cutoff_for_thermal(nbar: float, tol: Optional[float] = None) -> int:
    """Smallest dimension keeping the geometric tail of a thermal state below tol."""
    tol = NUMERICS_SETTINGS["truncation_tol"] if tol is None else tol
    if nbar <= 0:
        return 1
    ratio = nbar / (1.0 + nbar)
    return int(math.ceil(math.log(tol) / math.log(ratio))) + 1


def _check_norm(value: float, what: str, tol: Optional[float] = None) -> None:
    tol = NUMERICS_SETTINGS["truncation_tol"] if tol is None else tol
    if value < 1.0 - tol:
        raise TruncationError(
            f"{what}: norm {value:.12f} lost more than {tol:g} to truncation; increase the cutoff"
        )
    if value > 1.0 + NUMERICS_SETTINGS["hermitian_tol"] * 100:
        raise IntegrityError(f"{what}: norm {value:.12f} exceeds 1")


def clamp_probabilities(values: np.ndarray) -> np.ndarray:
    values = np.real(np.asarray(values))
    worst = float(values.min())
    if worst < -NUMERICS_SETTINGS["negativity_tol"]:
        raise IntegrityError(f"Negative photon-number probability {worst:.3e}")
    return np.clip(values, 0.0, None)


# =============================================================================
# STATE CONSTRUCTORS
# =============================================================================

def fock_state(n: int, cutoff: CutoffLike) -> StateVector:
    """Photon-number eigenstate |n>."""
    cutoff = as_cutoff(cutoff)
    if n < 0 or n >= cutoff.dim:
        raise DomainError(f"Fock level {n} outside basis |0>..|{cutoff.dim - 1}>")
    amplitudes = np.zeros(cutoff.dim, dtype=complex)
    amplitudes[n] = 1.0
    return StateVector(amplitudes, cutoff)


def coherent_state(alpha: complex, cutoff: CutoffLike) -> StateVector:
    """
    Coherent state |alpha>, c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!).

    Magnitudes are built in log space so large n does not overflow.
    """
    cutoff = as_cutoff(cutoff)
    n = np.arange(cutoff.dim)
    magnitude = np.exp(xlogy(n, abs(alpha)) - 0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1))
    amplitudes = magnitude * np.exp(1j * n * np.angle(alpha))
    state = StateVector(amplitudes, cutoff)
    _check_norm(state.norm2, f"coherent_state({alpha}) at {cutoff}")
    return state


def thermal_state(nbar: float, cutoff: CutoffLike) -> DensityMatrix:
    """Thermal (geometric) state with mean photon number nbar."""
    cutoff = as_cutoff(cutoff)
    if nbar < 0:
        raise DomainError(f"Mean photon number must be non-negative, got {nbar}")
    n = np.arange(cutoff.dim)
    p = np.exp(xlogy(n, nbar) - (n + 1) * np.log1p(nbar))
    rho = DensityMatrix(np.diag(p), cutoff)
    _check_norm(rho.trace, f"thermal_state({nbar}) at {cutoff}")
    return rho


def density_from_pure(psi: StateVector) -> DensityMatrix:
    """|psi><psi|."""
    return DensityMatrix(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.cutoff)


def fock_density(n: int, cutoff: CutoffLike) -> DensityMatrix:
    return density_from_pure(fock_state(n, cutoff))


def coherent_density(alpha: complex, cutoff: CutoffLike) -> DensityMatrix:
    return density_from_pure(coherent_state(alpha, cutoff))


# =============================================================================
# DISPLACEMENT
# =============================================================================

@lru_cache(maxsize=64)
def offset_indices(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """All (offset a, degree k) pairs with a + k < dim."""
    a, k = np.nonzero(np.add.outer(np.arange(dim), np.arange(dim)) < dim)
    a.setflags(write=False)
    k.setflags(write=False)
    return a, k


def offset_laguerre_table(lin, quad, log_prefactor: np.ndarray, dim: int) -> np.ndarray:
    """
    Normalized associated-Laguerre table shared by the displacement and
    ordered phase-space kernels.

    Returns F[p, a, k] for a batch of p, offset a and degree k, with
    F[p, a, 0] = exp(log_prefactor[p, a]) and

        F[k+1] = (((2k+1+a) lin + quad) F[k] - lin^2 sqrt(k(k+a)) F[k-1])
                 / sqrt((k+1)(k+1+a))

    The sqrt(k!/(k+a)!) factor ratios are absorbed into the recurrence, so
    no factorial is ever formed. Entries with a + k >= dim are unused.
    """
    lin = np.asarray(lin, dtype=float).reshape(-1, 1)
    quad = np.asarray(quad, dtype=float).reshape(-1, 1)
    log_prefactor = np.atleast_2d(log_prefactor)
    a = np.arange(dim, dtype=float)[None, :]

    table = np.zeros((log_prefactor.shape[0], dim, dim))
    table[:, :, 0] = np.exp(log_prefactor)
    if dim > 1:
        table[:, :, 1] = ((1.0 + a) * lin + quad) * table[:, :, 0] / np.sqrt(1.0 + a)
    for k in range(1, dim - 1):
        table[:, :, k + 1] = (
            ((2 * k + 1 + a) * lin + quad) * table[:, :, k]
            - lin ** 2 * np.sqrt(k * (k + a)) * table[:, :, k - 1]
        ) / np.sqrt((k + 1) * (k + 1 + a))
    return table


def _displacement_matrix(delta: complex, dim: int) -> np.ndarray:
    x = abs(delta) ** 2
    offsets = np.arange(dim)
    log_prefactor = xlogy(offsets, abs(delta)) - 0.5 * x - 0.5 * gammaln(offsets + 1)
    table = offset_laguerre_table(1.0, -x, log_prefactor, dim)[0]

    a, k = offset_indices(dim)
    values = table[a, k]
    theta = float(np.angle(delta))
    matrix = np.zeros((dim, dim), dtype=complex)
    # <k+a|D|k> = sqrt(k!/(k+a)!) delta^a e^{-x/2} L_k^a(x)
    matrix[k + a, k] = values * np.exp(1j * a * theta)
    # <k|D|k+a> = sqrt(k!/(k+a)!) (-delta*)^a e^{-x/2} L_k^a(x)
    upper = a > 0
    matrix[k[upper], k[upper] + a[upper]] = values[upper] * np.exp(1j * a[upper] * (np.pi - theta))
    return matrix


def displacement_operator(delta: complex, cutoff: CutoffLike) -> Operator:
    """D(delta) = exp(delta a^+ - delta* a), exact matrix elements within the cutoff."""
    cutoff = as_cutoff(cutoff)
    if cutoff.dim < cutoff_for_amplitude(delta) and NUMERICS_SETTINGS["verbose"]:
        print(
            f"⚠️ displacement_operator({delta}): {cutoff} below capacity "
            f"{cutoff_for_amplitude(delta)}; upper levels will leak"
        )
    return Operator(_displacement_matrix(complex(delta), cutoff.dim), cutoff)


# =============================================================================
# DENSITY-MATRIX UTILITIES
# =============================================================================

def conjugate_by(rho: DensityMatrix, u: Operator) -> DensityMatrix:
    """
    U rho U^+, re-symmetrized.

    Raises:
        TruncationError: U pushes more than truncation_tol of the trace
            past the cutoff.
    """
    cutoff = check_same_cutoff(rho, u)
    result = u.elements @ rho.elements @ u.adjoint.elements
    conjugated = DensityMatrix(0.5 * (result + result.conj().T), cutoff)
    _check_norm(1.0 - (rho.trace - conjugated.trace), f"conjugate_by at {cutoff}")
    return conjugated


def number_distribution(rho: DensityMatrix) -> PhotocountDistribution:
    """Diagonal of rho as photon-number statistics."""
    return PhotocountDistribution(clamp_probabilities(np.diag(rho.elements)))


def displaced_number_distribution(
    rho: DensityMatrix,
    delta: complex,
    tol: Optional[float] = None,
) -> PhotocountDistribution:
    """
    Photon-number statistics of D(delta) rho D(delta)^+.

    The displaced state needs more levels than rho itself, so the Fock
    space is padded (doubling) until the weight pushed past the padding is
    below ``tol``. Matrix elements of D are exact for every level kept, so
    the only error is that lost tail.

    Raises:
        TruncationError: padding exceeds ``max_internal_dim``.
    """
    tol = NUMERICS_SETTINGS["truncation_tol"] if tol is None else tol
    dim = rho.cutoff.dim
    if delta == 0:
        return number_distribution(rho)

    ceiling = NUMERICS_SETTINGS["max_internal_dim"]
    size = max(dim, cutoff_for_amplitude(abs(delta) + math.sqrt(dim - 1)))
    size = min(size, max(ceiling, dim))
    while True:
        columns = _displacement_matrix(complex(delta), size)[:, :dim]
        p = np.real(np.sum((columns @ rho.elements) * columns.conj(), axis=1))
        leaked = rho.trace - float(p.sum())
        if leaked <= tol:
            return PhotocountDistribution(clamp_probabilities(p))
        if size >= ceiling:
            raise TruncationError(
                f"Displacement by {delta} leaks {leaked:.3e} beyond {size} levels "
                f"(limit {ceiling})"
            )
        size = min(2 * size, ceiling)


# =============================================================================
# MOMENTS
# =============================================================================

def mean_amplitude(rho: DensityMatrix) -> complex:
    """<a> = Tr(rho a)."""
    n = np.arange(1, rho.cutoff.dim)
    return complex(np.sum(np.sqrt(n) * rho.elements[n, n - 1]))


def mean_photon_number(rho: DensityMatrix) -> float:
    return float(np.dot(np.arange(rho.cutoff.dim), rho.diagonal()))


def effective_support(rho: DensityMatrix, tol: Optional[float] = None) -> int:
    """Highest Fock level whose population exceeds tol."""
    tol = NUMERICS_SETTINGS["truncation_tol"] if tol is None else tol
    populated = np.nonzero(rho.diagonal() > tol)[0]
    return int(populated[-1]) if populated.size else 0


# =============================================================================
# TEST
# =============================================================================

if __name__ == "__main__":
    print("🔢 Fock Space Module")
    print("=" * 60)
    psi = coherent_state(1.0, 12)
    print(f"|c0|^2 of |alpha=1>: {abs(psi.amplitudes[0]) ** 2:.6f}")
    d = displacement_operator(0.5, 16)
    print(f"<1|D(0.5)|1> = {d.elements[1, 1].real:.6f}")
    print(f"Thermal p0 (nbar=1): {thermal_state(1.0, 40).elements[0, 0].real:.6f}")
    print("\n✅ Fock space ready")

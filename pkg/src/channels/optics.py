"""
🔦 Optics Channels
==================

Physical channel layer: two-mode beam-splitter mixing, the lossy
detector, photocount statistics of the counted port and the parity
(alternating series) expectation.

Beam-splitter convention: the counted mode is

    b = sqrt(T) a_S - sqrt(1-T) a_P,

and the discarded mode is c = -sqrt(1-T) a_S - sqrt(T) a_P, so a single
signal photon leaves as sqrt(T)|1,0> - sqrt(1-T)|0,1>.
"""

import math
import os
import sys
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from config.settings import NUMERICS_SETTINGS
from src.numerics.base_numerics import (
    Cutoff,
    DensityMatrix,
    DomainError,
    IntegrityError,
    PhotocountDistribution,
    StateVector,
    TruncationError,
    check_same_cutoff,
)
from src.numerics.fockspace import (
    clamp_probabilities,
    displaced_number_distribution,
    number_distribution,
)


# =============================================================================
# PARAMETER CHECKS
# =============================================================================

def check_transmission(T: float, allow_unit: bool = False) -> float:
    """0 < T < 1, or 0 < T <= 1 where the probe may decouple."""
    T = float(T)
    upper_ok = T <= 1.0 if allow_unit else T < 1.0
    if not (T > 0.0 and upper_ok):
        bound = "(0, 1]" if allow_unit else "(0, 1)"
        raise DomainError(f"Transmission must lie in {bound}, got {T}")
    return T


def check_efficiency(eta: float) -> float:
    eta = float(eta)
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"Detector efficiency must lie in (0, 1], got {eta}")
    return eta


# =============================================================================
# TWO-MODE STATES
# =============================================================================

class TwoModePureState:
    """Amplitudes psi[m, n]: m photons in the counted port, n in the discarded one."""

    def __init__(self, amplitudes, cutoff: Cutoff):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (cutoff.dim, cutoff.dim):
            raise IntegrityError(f"Two-mode amplitudes {amplitudes.shape} do not match {cutoff}")
        self.cutoff = cutoff
        self.amplitudes = amplitudes
        self.amplitudes.setflags(write=False)

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def __repr__(self) -> str:
        return f"TwoModePureState(dim={self.cutoff.dim}, norm2={self.norm2:.12f})"


@lru_cache(maxsize=32)
def beam_splitter_blocks(dim: int, T: float) -> Tuple[np.ndarray, ...]:
    """
    Photon-number blocks of the beam-splitter unitary.

    Block N maps input signal count p (probe N - p) to counted-port count
    m (discarded N - m):

        U[m, p] = sqrt(m!(N-m)! / (p!(N-p)!))
                  sum_j C(p, j) C(N-p, m-j) (-1)^(N-j)
                        T^((j + N-p-m+j)/2) (1-T)^((p-j + m-j)/2)

    with j signal photons routed to the counted port. Binomials come from
    log-gamma so nothing overflows past n = 170.
    """
    log_t, log_r = math.log(T), math.log1p(-T)
    log_fact = gammaln(np.arange(2 * dim) + 1.0)
    blocks = []
    for total in range(2 * dim - 1):
        m = np.arange(total + 1)[:, None, None]
        p = np.arange(total + 1)[None, :, None]
        j = np.arange(total + 1)[None, None, :]
        q, k = total - p, m - j
        valid = (j <= p) & (k >= 0) & (k <= q)
        jj, kk = np.where(valid, j, 0), np.where(valid, k, 0)
        log_term = (
            0.5 * (log_fact[m] + log_fact[total - m] - log_fact[p] - log_fact[q])
            + log_fact[p] - log_fact[jj] - log_fact[np.maximum(p - jj, 0)]
            + log_fact[q] - log_fact[kk] - log_fact[np.maximum(q - kk, 0)]
            + 0.5 * (jj + q - kk) * log_t
            + 0.5 * (p - jj + kk) * log_r
        )
        sign = np.where((total - jj) % 2 == 0, 1.0, -1.0)
        terms = np.where(valid, sign * np.exp(log_term), 0.0)
        block = terms.sum(axis=2)
        block.setflags(write=False)
        blocks.append(block)
    return tuple(blocks)


def _mix_products(products: np.ndarray, T: float) -> np.ndarray:
    """Apply the beam splitter to product amplitudes [..., signal, probe]."""
    dim = products.shape[-1]
    output = np.zeros_like(products)
    for total, block in enumerate(beam_splitter_blocks(dim, T)):
        levels = np.arange(max(0, total - dim + 1), min(total, dim - 1) + 1)
        incoming = products[..., levels, total - levels]
        if not np.any(incoming):
            continue
        output[..., levels, total - levels] = incoming @ block[np.ix_(levels, levels)].T
    return output


def _mix_pure(psi_S: StateVector, psi_P: StateVector, T: float) -> Tuple[np.ndarray, float]:
    output = _mix_products(np.outer(psi_S.amplitudes, psi_P.amplitudes), T)
    leaked = psi_S.norm2 * psi_P.norm2 - float(np.sum(np.abs(output) ** 2))
    return output, leaked


def beam_splitter_pure(psi_S: StateVector, psi_P: StateVector, T: float) -> TwoModePureState:
    """
    Mix a pure signal with a pure probe.

    Raises:
        TruncationError: more than truncation_tol of the output lands on
            photon numbers >= dim in either port.
    """
    T = check_transmission(T)
    cutoff = check_same_cutoff(psi_S, psi_P)
    output, leaked = _mix_pure(psi_S, psi_P, T)
    if leaked > NUMERICS_SETTINGS["truncation_tol"]:
        raise TruncationError(
            f"Beam splitter output leaks {leaked:.3e} beyond {cutoff}; increase the cutoff"
        )
    return TwoModePureState(output, cutoff)


def counted_mode_distribution(two_mode: TwoModePureState) -> PhotocountDistribution:
    """Trace out the discarded port."""
    return PhotocountDistribution(np.sum(np.abs(two_mode.amplitudes) ** 2, axis=1))


def _eigen_mixture(rho: DensityMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Positive eigenvalues and their eigenvectors (as columns)."""
    weights, vectors = np.linalg.eigh(rho.elements)
    if weights.min() < -NUMERICS_SETTINGS["negativity_tol"]:
        raise IntegrityError(f"Density matrix has negative eigenvalue {weights.min():.3e}")
    keep = weights > 0.0
    return weights[keep], vectors[:, keep]


def mixed_counted_distribution(rho_S: DensityMatrix, rho_P: DensityMatrix, T: float) -> PhotocountDistribution:
    """
    Counted-port statistics for uncorrelated mixed inputs.

    Both states are eigendecomposed and every eigen-pair is mixed as a
    pure product state; the batches run in a fixed pair order. Pairs with
    weight product below 1e-12 are skipped.
    """
    T = check_transmission(T)
    cutoff = check_same_cutoff(rho_S, rho_P)
    w_s, v_s = _eigen_mixture(rho_S)
    w_p, v_p = _eigen_mixture(rho_P)

    weights = np.outer(w_s, w_p)
    kept = weights >= 1e-12
    dropped = float(weights[~kept].sum())
    i_s, i_p = np.nonzero(kept)

    p = np.zeros(cutoff.dim)
    batch = NUMERICS_SETTINGS["mixing_batch"]
    for start in range(0, i_s.size, batch):
        s_idx, p_idx = i_s[start:start + batch], i_p[start:start + batch]
        products = v_s[:, s_idx].T[:, :, None] * v_p[:, p_idx].T[:, None, :]
        probabilities = np.abs(_mix_products(products, T)) ** 2
        pair_weights = weights[s_idx, p_idx]
        leaked = 1.0 - probabilities.sum(axis=(1, 2))
        dropped += float(np.dot(pair_weights, np.clip(leaked, 0.0, None)))
        p += np.einsum("k,kmn->m", pair_weights, probabilities)
    if dropped > NUMERICS_SETTINGS["truncation_tol"]:
        raise TruncationError(
            f"Mixed inputs lose {dropped:.3e} to skipped pairs and truncation at {cutoff}"
        )
    return PhotocountDistribution(clamp_probabilities(p))


# =============================================================================
# LOSS
# =============================================================================

@lru_cache(maxsize=64)
def _thinning_matrix(size: int, eta: float) -> np.ndarray:
    n = np.arange(size)
    matrix = binom.pmf(n[:, None], n[None, :], eta)
    matrix.setflags(write=False)
    return matrix


def loss_channel(p: PhotocountDistribution, eta: float) -> PhotocountDistribution:
    """Bernoulli thinning: p'_k = sum_{n>=k} C(n,k) eta^k (1-eta)^(n-k) p_n."""
    eta = check_efficiency(eta)
    if eta == 1.0:
        return PhotocountDistribution(p.p)
    return PhotocountDistribution(_thinning_matrix(len(p), eta) @ p.p)


def quantum_attenuate(rho: DensityMatrix, T: float) -> DensityMatrix:
    """
    Amplitude damping to transmission T with Kraus operators

        A_k = sum_n sqrt(C(n,k) T^(n-k) (1-T)^k) |n-k><n|.
    """
    T = check_transmission(T, allow_unit=True)
    if T == 1.0:
        return DensityMatrix(rho.elements, rho.cutoff)
    dim = rho.cutoff.dim
    n = np.arange(dim)
    result = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        kraus = np.sqrt(binom.pmf(k, n[k:], 1.0 - T))
        result[: dim - k, : dim - k] += kraus[:, None] * rho.elements[k:, k:] * kraus[None, :]
    return DensityMatrix(0.5 * (result + result.conj().T), rho.cutoff)


# =============================================================================
# PARITY
# =============================================================================

def pi_expectation(p: PhotocountDistribution) -> float:
    """Alternating series sum_n (-1)^n p_n."""
    signs = np.where(np.arange(len(p)) % 2 == 0, 1.0, -1.0)
    return float(np.dot(signs, p.p))


# =============================================================================
# COHERENT-PROBE SHORTCUT
# =============================================================================

def displaced_loss_distribution(rho_S: DensityMatrix, alpha: complex, T: float, eta: float) -> PhotocountDistribution:
    """
    Counted-port statistics for a coherent probe |alpha>.

    The signal is attenuated to T, displaced by -sqrt(1-T) alpha, counted,
    then thinned by the detector efficiency. T = 1 decouples the probe.
    """
    T = check_transmission(T, allow_unit=True)
    eta = check_efficiency(eta)
    attenuated = quantum_attenuate(rho_S, T)
    delta = -math.sqrt(1.0 - T) * complex(alpha)
    return loss_channel(displaced_number_distribution(attenuated, delta), eta)


def limit_displaced_distribution(rho_S: DensityMatrix, gamma: complex, eta: float) -> PhotocountDistribution:
    """
    T -> 1 limit at fixed rescaled amplitude gamma = sqrt((1-T)/T) alpha:
    the signal is displaced by -gamma without attenuation, then thinned.
    """
    eta = check_efficiency(eta)
    return loss_channel(displaced_number_distribution(rho_S, -complex(gamma)), eta)


# =============================================================================
# TEST
# =============================================================================

if __name__ == "__main__":
    from src.numerics.fockspace import fock_density, fock_state

    print("🔦 Optics Module")
    print("=" * 60)
    mixed = beam_splitter_pure(fock_state(1, 6), fock_state(0, 6), 0.75)
    print(f"|1> at T=0.75 -> counted p = {counted_mode_distribution(mixed).p[:3]}")
    thinned = loss_channel(number_distribution(fock_density(1, 6)), 0.8)
    print(f"Fock 1 at eta=0.8 -> {thinned.p[:3]}, parity {pi_expectation(thinned):.3f}")
    print("\n✅ Optics ready")

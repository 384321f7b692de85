"""
🌀 Quasiprobability Distributions
=================================

Wigner and s-ordered quasidistributions of truncated states, and the
phase-space overlap form of the parity expectation.

Convention: phase-space points are complex amplitudes beta, the vacuum
Wigner function is (2/pi) exp(-2|beta|^2) and every W integrates to 1.

Two evaluation routes exist and are kept in agreement by the tests:
- ``quasi_s``: pointwise series over the displaced photon statistics,
      W(beta; s) = 2/(pi(1-s)) sum_n ((s+1)/(s-1))^n <n|D(-beta) rho D(-beta)^+|n>
- ``quasi_s_grid``: closed-form ordered kernel on arrays of points,
  vectorized in batches, used for quadrature.
"""

import math
import os
import sys
from typing import Optional

import numpy as np
from scipy.special import gammaln, xlogy

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from config.settings import NUMERICS_SETTINGS, QUADRATURE_SETTINGS, QUASI_SETTINGS
from src.numerics.base_numerics import DensityMatrix, DomainError, SupportError, TruncationError
from src.numerics.fockspace import (
    displaced_number_distribution,
    effective_support,
    mean_amplitude,
    offset_indices,
    offset_laguerre_table,
)


# =============================================================================
# PHASE-SPACE GRID
# =============================================================================

class PhaseGrid:
    """
    Square Cartesian midpoint grid over (Re beta, Im beta).

    Cell centres sit at center + (-L + (i + 1/2) h) with h = 2L / points.
    """

    def __init__(
        self,
        half_extent: float,
        points_per_axis: int = QUADRATURE_SETTINGS["points_per_axis"],
        center: complex = 0j,
    ):
        if not half_extent > 0:
            raise DomainError(f"Grid half extent must be positive, got {half_extent}")
        if int(points_per_axis) != points_per_axis or points_per_axis < 2:
            raise DomainError(f"Grid needs at least 2 points per axis, got {points_per_axis}")
        self.half_extent = float(half_extent)
        self.points_per_axis = int(points_per_axis)
        self.center = complex(center)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / self.points_per_axis

    def axis(self) -> np.ndarray:
        offsets = -self.half_extent + (np.arange(self.points_per_axis) + 0.5) * self.spacing
        return offsets

    def points(self) -> np.ndarray:
        """Complex grid points, shape (points_per_axis, points_per_axis), [imag, real]."""
        offsets = self.axis()
        re, im = np.meshgrid(self.center.real + offsets, self.center.imag + offsets)
        return re + 1j * im

    def integrate(self, values: np.ndarray, stride: int = 1) -> float:
        """Midpoint rule; ``stride=2`` reuses every other point at step 2h."""
        values = np.asarray(values)[::stride, ::stride]
        return float(np.sum(values) * (stride * self.spacing) ** 2)

    def __repr__(self) -> str:
        return (
            f"PhaseGrid(center={self.center}, half_extent={self.half_extent}, "
            f"points_per_axis={self.points_per_axis})"
        )


def phase_radius(rho: DensityMatrix) -> float:
    """Radius beyond which the quasidistributions of rho are negligible."""
    spread = max(abs(mean_amplitude(rho)), math.sqrt(effective_support(rho)))
    return spread + QUADRATURE_SETTINGS["margin"]


def default_phase_grid(
    rho_S: DensityMatrix,
    rho_P: Optional[DensityMatrix] = None,
    T: Optional[float] = None,
) -> PhaseGrid:
    """
    Grid centred at the origin covering the signal and, when given, the
    probe factor rescaled by sqrt(T/(1-T)).
    """
    half_extent = max(QUADRATURE_SETTINGS["min_half_extent"], phase_radius(rho_S))
    if rho_P is not None:
        kappa = math.sqrt(T / (1.0 - T))
        half_extent = max(half_extent, phase_radius(rho_P) / kappa)
    return PhaseGrid(half_extent)


# =============================================================================
# POLYNOMIALS AND CLOSED FORMS
# =============================================================================

def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) by (k+1)L_{k+1} = (2k+1-x)L_k - k L_{k-1}."""
    if n < 0:
        raise DomainError(f"Laguerre degree must be non-negative, got {n}")
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    current = 1.0 - x
    if n == 0:
        current = previous
    for k in range(1, n):
        previous, current = current, ((2 * k + 1 - x) * current - k * previous) / (k + 1)
    return float(current) if current.ndim == 0 else current


def wigner_fock(n: int, beta):
    """W_n(beta) = (2/pi) (-1)^n exp(-2|beta|^2) L_n(4|beta|^2)."""
    r2 = np.abs(np.asarray(beta)) ** 2
    value = (2.0 / np.pi) * (-1) ** n * np.exp(-2.0 * r2) * laguerre(n, 4.0 * r2)
    return float(value) if np.ndim(value) == 0 else value


# =============================================================================
# s-ORDERED QUASIDISTRIBUTIONS
# =============================================================================

def check_ordering(s: float, allow_positive: bool = False) -> float:
    """
    Validate an ordering parameter.

    s <= s_max (0) keeps |(s+1)/(s-1)| <= 1 so the series is geometric;
    0 < s < 1 needs ``allow_positive``; s >= 1 (P function) is rejected.
    """
    s = float(s)
    if not math.isfinite(s) or s >= 1.0:
        raise DomainError(f"Ordering parameter must satisfy s < 1, got {s}")
    if s > QUASI_SETTINGS["s_max"] and not allow_positive:
        raise DomainError(
            f"Ordering s={s} above s_max={QUASI_SETTINGS['s_max']}; pass allow_positive=True"
        )
    return s


def quasi_s(rho: DensityMatrix, beta: complex, s: float, allow_positive: bool = False) -> float:
    """
    s-ordered quasidistribution W(beta; s) by the displaced-statistics series.

    Raises:
        DomainError: invalid s.
        TruncationError: the series tail beyond the padded Fock space
            could exceed the truncation tolerance.
    """
    s = check_ordering(s, allow_positive)
    tol = NUMERICS_SETTINGS["truncation_tol"]
    ratio = (s + 1.0) / (s - 1.0)
    scale = 2.0 / (np.pi * (1.0 - s))

    statistics = displaced_number_distribution(rho, -complex(beta))
    p = statistics.p
    leaked = max(rho.trace - statistics.total, 0.0)
    tail_bound = scale * abs(ratio) ** p.size * leaked
    if tail_bound > tol:
        raise TruncationError(
            f"quasi_s series at beta={beta}, s={s} not converged: tail bound {tail_bound:.3e}"
        )
    weights = np.power(ratio, np.arange(p.size))
    return float(scale * np.dot(weights, p))


def wigner(rho: DensityMatrix, beta: complex) -> float:
    """Wigner function, quasi_s at s = 0."""
    return quasi_s(rho, beta, 0.0)


def quasi_s_grid(rho: DensityMatrix, points, s: float, allow_positive: bool = False) -> np.ndarray:
    """
    W(beta; s) on an array of points via the closed-form ordered kernel

        <n|T(beta; s)|n+a> = sqrt(n!/(n+a)!) (2/(1-s))^(a+1) r^n (beta*)^a
                             exp(-2|beta|^2/(1-s)) L_n^a(4|beta|^2/(1-s^2)),

    r = (s+1)/(s-1), W = Tr(rho T)/pi. The r^n L_n^a product is carried by
    one recurrence, which stays finite at s = -1.
    """
    s = check_ordering(s, allow_positive)
    points = np.asarray(points, dtype=complex)
    flat = points.ravel()
    dim = rho.cutoff.dim
    ratio = (s + 1.0) / (s - 1.0)

    a_idx, k_idx = offset_indices(dim)
    offdiagonals = np.zeros((dim, dim), dtype=complex)
    offdiagonals[a_idx, k_idx] = rho.elements[k_idx + a_idx, k_idx]
    offsets = np.arange(dim)
    multiplicity = np.where(offsets == 0, 1.0, 2.0)

    out = np.empty(flat.size)
    chunk = QUADRATURE_SETTINGS["chunk_size"]
    for start in range(0, flat.size, chunk):
        beta = flat[start:start + chunk]
        modulus = np.abs(beta)
        log_prefactor = (
            (offsets + 1) * math.log(2.0 / (1.0 - s))
            + xlogy(offsets[None, :], modulus[:, None])
            - 2.0 * modulus[:, None] ** 2 / (1.0 - s)
            - 0.5 * gammaln(offsets + 1)
        )
        table = offset_laguerre_table(
            np.full(beta.size, ratio),
            4.0 * modulus ** 2 / (1.0 - s) ** 2,
            log_prefactor,
            dim,
        )
        sums = np.einsum("pak,ak->pa", table, offdiagonals)
        phases = np.exp(-1j * np.outer(np.angle(beta), offsets))
        out[start:start + beta.size] = np.real(np.sum(multiplicity * sums * phases, axis=1)) / np.pi
    return out.reshape(points.shape)


def wigner_grid(rho: DensityMatrix, points) -> np.ndarray:
    return quasi_s_grid(rho, points, 0.0)


# =============================================================================
# PHASE-SPACE OVERLAP
# =============================================================================

def _check_support(integrand: np.ndarray, grid: PhaseGrid) -> None:
    peak = float(np.max(np.abs(integrand)))
    edge = float(max(
        np.max(np.abs(integrand[0, :])),
        np.max(np.abs(integrand[-1, :])),
        np.max(np.abs(integrand[:, 0])),
        np.max(np.abs(integrand[:, -1])),
    ))
    if peak == 0.0:
        raise SupportError(f"Integrand vanishes on {grid}")
    if edge > QUADRATURE_SETTINGS["boundary_tol"] * peak:
        raise SupportError(
            f"Integrand at the boundary of {grid} is {edge / peak:.3e} of its peak; enlarge the grid"
        )


def overlap_pi(
    rho_S: DensityMatrix,
    rho_P: DensityMatrix,
    T: float,
    grid: Optional[PhaseGrid] = None,
) -> float:
    """
    Parity expectation as a phase-space overlap,

        <Pi> = pi/(2(1-T)) Int d^2beta W_S(beta) W_P(sqrt(T/(1-T)) beta).

    Raises:
        DomainError: T outside (0, 1).
        SupportError: grid boundary not negligible, or the half-step
            comparison exceeds ``refinement_tol``.
    """
    if not 0.0 < T < 1.0:
        raise DomainError(f"Overlap formula needs 0 < T < 1, got {T}")
    kappa = math.sqrt(T / (1.0 - T))
    grid = grid if grid is not None else default_phase_grid(rho_S, rho_P, T)

    points = grid.points()
    integrand = wigner_grid(rho_S, points) * wigner_grid(rho_P, kappa * points)
    _check_support(integrand, grid)

    prefactor = np.pi / (2.0 * (1.0 - T))
    value = prefactor * grid.integrate(integrand)
    coarse = prefactor * grid.integrate(integrand, stride=2)
    if abs(value - coarse) > QUADRATURE_SETTINGS["refinement_tol"]:
        raise SupportError(
            f"Quadrature unresolved on {grid}: |I(h) - I(2h)| = {abs(value - coarse):.3e}"
        )
    return value


def rescaled_second_moment(rho_P: DensityMatrix, T: float, grid: Optional[PhaseGrid] = None) -> float:
    """<|beta|^2> of the normalized probe factor W_P(sqrt(T/(1-T)) beta); T = 1/2 is unrescaled."""
    if not 0.0 < T < 1.0:
        raise DomainError(f"Rescaling needs 0 < T < 1, got {T}")
    kappa = math.sqrt(T / (1.0 - T))
    if grid is None:
        grid = PhaseGrid(max(QUADRATURE_SETTINGS["min_half_extent"], phase_radius(rho_P)) / kappa)
    points = grid.points()
    factor = wigner_grid(rho_P, kappa * points)
    return grid.integrate(np.abs(points) ** 2 * factor) / grid.integrate(factor)


# =============================================================================
# TEST
# =============================================================================

if __name__ == "__main__":
    from src.numerics.fockspace import fock_density

    print("🌀 Quasiprobability Module")
    print("=" * 60)
    one = fock_density(1, 8)
    print(f"W_1(0) closed form: {wigner_fock(1, 0):.6f}")
    print(f"W_1(0) series:      {wigner(one, 0):.6f}")
    print(f"W_1(0; -1/3):       {quasi_s(one, 0, -1 / 3):.6f}")
    print("\n✅ Quasidistributions ready")

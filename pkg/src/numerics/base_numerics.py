"""
🔧 Base Numerics
================

Foundation value types shared by every module (cutoff, pure states,
density matrices, operators, photocount distributions) and the
exception hierarchy used to fail loudly on numerical problems.
"""

import os
import sys
from typing import Optional, Union

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from config.settings import NUMERICS_SETTINGS, EXIT_CODES


# =============================================================================
# ERRORS
# =============================================================================

class NumericsError(Exception):
    """Base exception for numerical failures."""

    exit_code = EXIT_CODES["numerics"]

    def __init__(self, message: str, exit_code: Optional[int] = None):
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(self.message)


class TruncationError(NumericsError):
    """Fock cutoff too small for the requested accuracy."""


class IntegrityError(NumericsError):
    """Numbers that cannot come from a valid state (negative probabilities, ...)."""


class CutoffMismatchError(NumericsError):
    """Operands truncated at different dimensions."""


class DomainError(NumericsError, ValueError):
    """Physical parameter outside its allowed range."""

    exit_code = EXIT_CODES["config"]


class SupportError(NumericsError):
    """Quadrature grid does not resolve the integrand."""


class ConfigError(NumericsError, ValueError):
    """Scan configuration rejected."""

    exit_code = EXIT_CODES["config"]


class ScanPointError(NumericsError):
    """A numerics failure at one point of a scan."""

    def __init__(self, index: int, target: complex, cause: NumericsError):
        self.index = index
        self.target = target
        self.cause = cause
        super().__init__(
            f"Scan point {index} (target {target:.6g}): {cause.message}",
            exit_code=cause.exit_code,
        )


# =============================================================================
# CUTOFF
# =============================================================================

class Cutoff:
    """Number of retained Fock levels, basis |0>..|dim-1>."""

    def __init__(self, dim: int):
        if isinstance(dim, Cutoff):
            dim = dim.dim
        if int(dim) != dim or dim < 1:
            raise DomainError(f"Cutoff dimension must be a positive integer, got {dim}")
        self.dim = int(dim)

    def __eq__(self, other) -> bool:
        return isinstance(other, Cutoff) and other.dim == self.dim

    def __hash__(self) -> int:
        return hash(self.dim)

    def __int__(self) -> int:
        return self.dim

    def __repr__(self) -> str:
        return f"Cutoff({self.dim})"


CutoffLike = Union[int, Cutoff]


def as_cutoff(cutoff: CutoffLike) -> Cutoff:
    """Accept an int or a Cutoff."""
    return cutoff if isinstance(cutoff, Cutoff) else Cutoff(cutoff)


def check_same_cutoff(*values) -> Cutoff:
    """Return the shared cutoff or raise CutoffMismatchError."""
    cutoffs = {v.cutoff for v in values}
    if len(cutoffs) != 1:
        dims = sorted(c.dim for c in cutoffs)
        raise CutoffMismatchError(f"Mixed cutoffs in one computation: {dims}")
    return cutoffs.pop()


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


# =============================================================================
# STATES AND OPERATORS
# =============================================================================

class StateVector:
    """Pure state of one mode in the truncated Fock basis."""

    def __init__(self, amplitudes, cutoff: Optional[CutoffLike] = None):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.ndim != 1:
            raise IntegrityError("State amplitudes must be a vector")
        self.cutoff = as_cutoff(cutoff if cutoff is not None else amplitudes.size)
        if amplitudes.size != self.cutoff.dim:
            raise CutoffMismatchError(
                f"{amplitudes.size} amplitudes for {self.cutoff}"
            )
        self.amplitudes = _frozen(amplitudes)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __repr__(self) -> str:
        return f"StateVector(dim={self.cutoff.dim}, norm2={self.norm2:.12f})"


class DensityMatrix:
    """
    Mixed state of one mode.

    Hermiticity is enforced on construction: deviations up to
    ``hermitian_tol`` are symmetrized away, larger ones are rejected.
    """

    def __init__(self, elements, cutoff: Optional[CutoffLike] = None):
        elements = np.asarray(elements, dtype=complex)
        if elements.ndim != 2 or elements.shape[0] != elements.shape[1]:
            raise IntegrityError(f"Density matrix must be square, got shape {elements.shape}")
        self.cutoff = as_cutoff(cutoff if cutoff is not None else elements.shape[0])
        if elements.shape[0] != self.cutoff.dim:
            raise CutoffMismatchError(f"{elements.shape} matrix for {self.cutoff}")

        skew = np.max(np.abs(elements - elements.conj().T)) if elements.size else 0.0
        if skew > NUMERICS_SETTINGS["hermitian_tol"]:
            raise IntegrityError(f"Density matrix is not Hermitian (deviation {skew:.3e})")
        self.elements = _frozen(0.5 * (elements + elements.conj().T))

    @property
    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.elements)).copy()

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.cutoff.dim}, trace={self.trace:.12f})"


class Operator:
    """Matrix of a single-mode operator in the truncated Fock basis."""

    def __init__(self, elements, cutoff: Optional[CutoffLike] = None):
        elements = np.asarray(elements, dtype=complex)
        if elements.ndim != 2 or elements.shape[0] != elements.shape[1]:
            raise IntegrityError(f"Operator must be square, got shape {elements.shape}")
        self.cutoff = as_cutoff(cutoff if cutoff is not None else elements.shape[0])
        if elements.shape[0] != self.cutoff.dim:
            raise CutoffMismatchError(f"{elements.shape} matrix for {self.cutoff}")
        self.elements = _frozen(elements)

    @property
    def adjoint(self) -> "Operator":
        return Operator(self.elements.conj().T, self.cutoff)

    def __matmul__(self, other: "Operator") -> "Operator":
        check_same_cutoff(self, other)
        return Operator(self.elements @ other.elements, self.cutoff)

    def __repr__(self) -> str:
        return f"Operator(dim={self.cutoff.dim})"


class PhotocountDistribution:
    """Probabilities p_n of counting n photons, n = 0..len-1."""

    def __init__(self, p):
        p = np.asarray(p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise IntegrityError("Photocount distribution must be a non-empty vector")
        if not np.all(np.isfinite(p)):
            raise IntegrityError("Photocount distribution contains non-finite values")
        worst = float(p.min())
        if worst < -NUMERICS_SETTINGS["negativity_tol"]:
            raise IntegrityError(f"Negative photocount probability {worst:.3e}")
        self.p = _frozen(p)

    @property
    def total(self) -> float:
        return float(self.p.sum())

    def padded(self, length: int) -> np.ndarray:
        """Probabilities zero-padded (never truncated) to at least ``length`` entries."""
        out = np.zeros(max(length, self.p.size))
        out[: self.p.size] = self.p
        return out

    def __len__(self) -> int:
        return self.p.size

    def __repr__(self) -> str:
        return f"PhotocountDistribution(levels={self.p.size}, total={self.total:.12f})"


def total_variation(p: PhotocountDistribution, q: PhotocountDistribution) -> float:
    """Total-variation distance, shorter vector zero-padded."""
    length = max(len(p), len(q))
    return 0.5 * float(np.abs(p.padded(length) - q.padded(length)).sum())


# =============================================================================
# TEST
# =============================================================================

if __name__ == "__main__":
    print("🔧 Base Numerics Module")
    print("=" * 60)
    vacuum = StateVector([1.0, 0.0, 0.0])
    print(f"✅ {vacuum}")
    print(f"✅ {DensityMatrix(np.diag([0.5, 0.5]))}")
    print(f"✅ {PhotocountDistribution([0.2, 0.8])}")

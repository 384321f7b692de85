"""Shared fixtures for the test suite."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.numerics.base_numerics import DensityMatrix
from src.numerics.fockspace import coherent_density, fock_density, thermal_state

DIM = 24


@pytest.fixture
def dim():
    return DIM


@pytest.fixture
def vacuum():
    return fock_density(0, DIM)


@pytest.fixture
def single_photon():
    return fock_density(1, DIM)


@pytest.fixture
def thermal_half():
    return thermal_state(0.5, DIM)


@pytest.fixture
def coherent_probe():
    return coherent_density(1.0, DIM)


@pytest.fixture
def superposition():
    """Pure state with coherences between |0>, |2> and |3>, normalized."""
    amplitudes = np.zeros(12, dtype=complex)
    amplitudes[[0, 2, 3]] = [1.0, 0.5 + 0.5j, -0.3j]
    amplitudes /= np.linalg.norm(amplitudes)
    return DensityMatrix(np.outer(amplitudes, amplitudes.conj()))


@pytest.fixture
def signal_states():
    """Signal states of the identity checks: Fock 0..3 and thermal 0.5."""
    states = {f"fock{n}": fock_density(n, DIM) for n in range(4)}
    states["thermal0.5"] = thermal_state(0.5, DIM)
    return states


@pytest.fixture
def scan_dict():
    """Small limit-mode scan of the single-photon state."""
    return {
        "signal": {"kind": "fock", "value": 1},
        "T": "limit",
        "eta": 0.8,
        "compensate": False,
        "grid": {"kind": "radial", "r_min": 0.0, "r_max": 1.5, "steps": 4},
        "events": 200,
        "master_seed": 11,
    }

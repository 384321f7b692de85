"""
⚙️ System Settings & Constants
==============================

Numerical tolerances, quadrature defaults, sampling and scan settings.
Selected values can be overridden from the environment (or a .env file):

    PCS_TRUNCATION_TOL   truncation tolerance (default 1e-8)
    PCS_VERBOSE          print progress and warnings (0/1)
    PCS_JOBS             default thread count for scans
"""

import os

from dotenv import load_dotenv

load_dotenv()

# =============================================================================
# PROJECT INFORMATION
# =============================================================================

PROJECT_NAME = "PhotonCountSampler"
VERSION = "1.0.0"

# =============================================================================
# FOCK-SPACE NUMERICS
# =============================================================================

NUMERICS_SETTINGS = {
    "truncation_tol": float(os.getenv("PCS_TRUNCATION_TOL", "1e-8")),
    "hermitian_tol": 1e-12,
    "negativity_tol": 1e-10,   # smallest tolerated negative probability
    "max_internal_dim": 1024,  # ceiling for adaptive Fock padding
    "mixing_batch": 256,       # eigen-pairs per beam-splitter batch
    "cutoff_sigmas": 6,        # Poisson tail width used by the cutoff heuristic
    "cutoff_offset": 4,
    "verbose": os.getenv("PCS_VERBOSE", "0") == "1",
}

# =============================================================================
# PHASE-SPACE QUADRATURE
# =============================================================================

QUADRATURE_SETTINGS = {
    "points_per_axis": 201,
    "min_half_extent": 3.0,
    "margin": 4.0,
    "boundary_tol": 1e-10,    # relative to the integrand peak
    "refinement_tol": 1e-6,   # |I(h) - I(2h)|
    "chunk_size": 2048,       # grid points per vectorized batch
}

QUASI_SETTINGS = {
    "s_max": 0.0,
}

# =============================================================================
# MONTE CARLO SAMPLING
# =============================================================================

SAMPLING_SETTINGS = {
    # Philox4x64-10 keyed through SeedSequence(master_seed, spawn_key=(stream_index,)).
    # Changing this breaks bit-exact reproduction of stored results.
    "rng_algorithm": "numpy-philox4x64-10/seedsequence-spawnkey-v1",
    "default_events": 1000,
    "default_seed": 20241225,
    "renormalization_report_tol": 1e-12,  # report |1 - sum p| above round-off
}

# =============================================================================
# SCAN ORCHESTRATION
# =============================================================================

SCAN_SETTINGS = {
    "cutoff_headroom": 8,
    "default_jobs": int(os.getenv("PCS_JOBS", "1")),
    "limit_scale": 1.0,
}

EXIT_CODES = {
    "success": 0,
    "config": 2,
    "numerics": 3,
    "io": 4,
}

# =============================================================================
# FILE PATHS
# =============================================================================

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

PATHS = {
    "config": os.path.join(BASE_DIR, "config"),
}

# =============================================================================
# TEST
# =============================================================================

if __name__ == "__main__":
    print(f"⚙️ {PROJECT_NAME} Settings")
    print("=" * 60)
    print(f"Version: {VERSION}")
    print(f"Truncation tolerance: {NUMERICS_SETTINGS['truncation_tol']:g}")
    print(f"Quadrature grid: {QUADRATURE_SETTINGS['points_per_axis']} points per axis")
    print(f"RNG: {SAMPLING_SETTINGS['rng_algorithm']}")
    print("\n✅ All settings loaded!")

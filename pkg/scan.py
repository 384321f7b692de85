"""
Photon-Counting Phase-Space Scan
================================

Command-line entry point: reads a JSON experiment, samples every point of
its grid and writes CSV / JSON results.

    python scan.py --config config/single_photon_uncompensated.json --out-csv uncompensated.csv

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 I/O failure.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional
sys.path.append(str(Path(__file__).parent))

from config.settings import EXIT_CODES, NUMERICS_SETTINGS, PROJECT_NAME
from src.numerics.base_numerics import ConfigError, NumericsError
from src.analysis.scan_runner import load_config, resolve_config, run_scan
from src.reporting.result_writer import emit_csv, emit_json, format_summary


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scan",
        description=f"{PROJECT_NAME}: direct phase-space sampling by photon counting",
    )
    parser.add_argument("--config", required=True, help="Path to the JSON scan configuration")
    parser.add_argument("--events", type=int, default=None, help="Monte Carlo events per point")
    parser.add_argument("--seed", "--master-seed", dest="master_seed", type=int, default=None,
                        help="Master seed of the per-point random streams")
    parser.add_argument("--compensate", type=parse_bool, default=None,
                        help="Weight counts by (1 - 2/eta)^n instead of (-1)^n (true|false)")
    parser.add_argument("--out-csv", default=None, help="Write rows as CSV")
    parser.add_argument("--out-json", default=None, help="Write config and rows as JSON")
    parser.add_argument("--analytic-only", action="store_true",
                        help="Skip sampling; emit analytic columns only")
    parser.add_argument("--jobs", dest="n_jobs", type=int, default=None, help="Worker threads")
    parser.add_argument("--verbose", action="store_true", help="Progress bar and numerics warnings")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        NUMERICS_SETTINGS["verbose"] = True

    print("=" * 70)
    print(f"🔭 {PROJECT_NAME.upper()} SCAN")
    print("=" * 70)

    # Step 1: configuration
    print("\n⚙️ STEP 1: Loading Configuration...")
    print("-" * 70)
    overrides = {
        "events": 0 if args.analytic_only else args.events,
        "master_seed": args.master_seed,
        "compensate": args.compensate,
        "n_jobs": args.n_jobs,
    }
    try:
        config = resolve_config(load_config(args.config, overrides))
    except ConfigError as e:
        print(f"❌ Config Error: {e.message}")
        return EXIT_CODES["config"]
    except NumericsError as e:
        print(f"❌ Config Error: {e.message}")
        return e.exit_code
    except OSError as e:
        print(f"❌ Cannot read {args.config}: {e}")
        return EXIT_CODES["io"]
    print(f"✅ {config.grid.steps} {config.grid.kind} steps, cutoff {config.cutoff}, "
          f"{config.events} events/point")

    # Step 2: scan
    print("\n🎲 STEP 2: Sampling Phase Space...")
    print("-" * 70)
    try:
        rows = run_scan(config)
    except NumericsError as e:
        print(f"❌ Numerics Error: {e.message}")
        return e.exit_code
    print(f"✅ {len(rows)} points done")

    # Step 3: export
    print("\n💾 STEP 3: Writing Results...")
    print("-" * 70)
    try:
        if args.out_csv:
            emit_csv(rows, args.out_csv)
            print(f"✅ CSV: {args.out_csv}")
        if args.out_json:
            emit_json(rows, config, args.out_json)
            print(f"✅ JSON: {args.out_json}")
    except OSError as e:
        print(f"❌ I/O Error: {e}")
        return EXIT_CODES["io"]

    print()
    print(format_summary(rows, config))
    print("\n" + "=" * 70)
    print("✅ SCAN COMPLETE!")
    print("=" * 70)
    return EXIT_CODES["success"]


if __name__ == "__main__":
    sys.exit(main())

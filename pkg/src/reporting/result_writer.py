"""
📄 Result Writer
================

Exports scan rows as CSV and JSON, and renders a short Markdown summary.

Both exports are deterministic: no timestamps, fixed column order, floats
at 17 significant digits, UTF-8 with LF line endings.
"""

import json
import os
import sys
from typing import List, Sequence

import pandas as pd

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from config.settings import PROJECT_NAME, SAMPLING_SETTINGS, VERSION
from src.analysis.scan_runner import ScanConfig, ScanRow, build_signal, resolve_config
from src.numerics.fockspace import mean_photon_number

COLUMNS: List[str] = list(ScanRow.model_fields)


def rows_to_frame(rows: Sequence[ScanRow]) -> pd.DataFrame:
    """One DataFrame row per scan point, columns in ScanRow field order."""
    return pd.DataFrame([row.model_dump() for row in rows], columns=COLUMNS)


def emit_csv(rows: Sequence[ScanRow], destination: str) -> None:
    """
    Write rows to ``destination``. An empty scan gives a header-only file;
    missing Monte Carlo values are empty cells.

    Raises:
        OSError: the file cannot be written.
    """
    rows_to_frame(rows).to_csv(
        destination,
        index=False,
        float_format="%.17g",
        na_rep="",
        lineterminator="\n",
        encoding="utf-8",
    )


def build_document(rows: Sequence[ScanRow], config: ScanConfig) -> dict:
    resolved = resolve_config(config).model_dump(mode="json")
    resolved["rng_algorithm"] = SAMPLING_SETTINGS["rng_algorithm"]
    return {
        "project": PROJECT_NAME,
        "version": VERSION,
        "config": resolved,
        "rows": [row.model_dump() for row in rows],
    }


def emit_json(rows: Sequence[ScanRow], config: ScanConfig, destination: str) -> None:
    """
    Write a self-describing document: the resolved config (with the chosen
    cutoff and RNG algorithm tag) plus the rows.

    Raises:
        OSError: the file cannot be written.
    """
    document = build_document(rows, config)
    with open(destination, "w", encoding="utf-8", newline="\n") as f:
        json.dump(document, f, indent=2, allow_nan=False)
        f.write("\n")


def format_summary(rows: Sequence[ScanRow], config: ScanConfig) -> str:
    """Markdown summary of a finished scan."""
    resolved = resolve_config(config)
    signal = resolved.signal
    lines = []
    lines.append(f"# {PROJECT_NAME} Scan Summary")
    lines.append("")
    lines.append(f"**Version:** {VERSION}")
    lines.append("")
    lines.append("| Setting | Value |")
    lines.append("|---------|-------|")
    lines.append(f"| Signal | {signal.kind} {signal.value:g} |")
    lines.append(f"| Signal mean photons | {mean_photon_number(build_signal(config)):.4g} |")
    lines.append(f"| Transmission | {resolved.T} |")
    lines.append(f"| Efficiency | {resolved.eta:g} |")
    lines.append(f"| Compensated | {'yes' if resolved.compensate else 'no'} |")
    lines.append(f"| Points | {len(rows)} |")
    lines.append(f"| Events / point | {resolved.events} |")
    lines.append(f"| Cutoff | {resolved.cutoff} |")
    lines.append("")

    if not rows:
        lines.append("*No points scanned.*")
        return "\n".join(lines)

    frame = rows_to_frame(rows)
    worst = frame.loc[frame["analytic_sigma"].idxmax()]
    lines.append("## 📊 Results")
    lines.append("")
    lines.append(f"- Parity range: {frame['analytic_mean'].min():+.4f} .. {frame['analytic_mean'].max():+.4f}")
    lines.append(
        f"- Largest analytic sigma: {worst['analytic_sigma']:.4g} "
        f"at target {complex(worst['target_re'], worst['target_im']):.4g}"
    )
    if resolved.events > 0:
        pulls = (frame["mc_mean"] - frame["analytic_mean"]) / frame["analytic_stderr"]
        pulls = pulls[frame["analytic_stderr"] > 0]
        within = int((pulls.abs() <= 4.0).sum()) + int((frame["analytic_stderr"] == 0).sum())
        lines.append(f"- Points within 4 sigma of the analytic mean: {within}/{len(frame)}")
    return "\n".join(lines)

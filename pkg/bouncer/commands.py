"""
Command builders behind ``run.py``.

Each ``cmd_*`` takes a validated run configuration and returns a
:class:`Report` (ordered rows, metadata, exit code). Writers turn a report
into CSV, JSON or an aligned text table; floats go through ``repr`` so
repeated runs produce byte-identical output.
"""

import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

from core.diagnostics import EXIT_NUMERICAL, EXIT_OK, EXIT_PARTIAL
from core.errors import ConfigError
from bouncer.continuum import PhysicalContext
from bouncer.experiment import bound_table, height_containment
from bouncer.lattice import DimensionlessParams
from bouncer.radiative import quadrupole_report
from bouncer.spectrum import density_profile, polymer_state, spectrum_table
from bouncer.transitions import VibrationSpectrumModel, vibration_lifetime_report

__all__ = [
    "Report",
    "cmd_spectrum",
    "cmd_profile",
    "cmd_bound",
    "cmd_lifetime",
    "cmd_rate",
    "render",
    "write_report",
    "COMMANDS",
]

logger = logging.getLogger(__name__)


@dataclass
class Report:
    command: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    @property
    def columns(self) -> List[str]:
        cols: List[str] = []
        for row in self.rows:
            for key in row:
                if key not in cols:
                    cols.append(key)
        return cols


def _s_key(s: float) -> str:
    return repr(float(s))


def cmd_spectrum(cfg, progress: bool = False) -> Report:
    """Level grid over SPECTRUM.S_LIST x 1..N_MAX by every applicable route."""
    spec = cfg.SPECTRUM
    table = spectrum_table(spec.S_LIST, spec.N_MAX, workers=cfg.OUTPUT.NUM_WORKERS, progress=progress,
                           max_dimension=spec.MAX_DIMENSION)
    n_failed = len(table.failed)
    n_total = len(table.cells)
    if n_failed == 0:
        code = EXIT_OK
    elif n_failed == n_total:
        code = EXIT_NUMERICAL
    else:
        code = EXIT_PARTIAL
    if n_failed:
        logger.warning("%d of %d spectrum cells failed", n_failed, n_total)
    agreement = {_s_key(s): v for s, v in sorted(table.dual_route_agreement().items())}
    meta = {"s_list": [float(s) for s in spec.S_LIST], "n_max": spec.N_MAX,
            "dual_route_max_difference": agreement, "failed_cells": n_failed}
    return Report("spectrum", table.rows(), meta, code)


def cmd_profile(cfg, method: str = "lattice") -> Report:
    """Lattice density against the continuum density.

    Rows at the lattice points carry both densities; the continuum curve on
    the SPECTRUM.PROFILE_RESOLUTION grid follows with ``method="continuum"``.
    """
    spec = cfg.SPECTRUM
    ctx = PhysicalContext.from_config(cfg.PHYSICS)
    params = DimensionlessParams(spec.PROFILE_S)
    state = polymer_state(params, int(spec.PROFILE_N), method=method)
    profile = density_profile(state, ctx, resolution=spec.PROFILE_RESOLUTION)
    rows = [{"z": float(z), "polymer_density": float(p), "continuum_density": float(c), "method": method}
            for z, p, c in zip(profile.lattice_z, profile.lattice_density, profile.continuum_at_lattice)]
    rows += [{"z": float(z), "polymer_density": None, "continuum_density": float(c), "method": "continuum"}
             for z, c in zip(profile.continuum_z, profile.continuum_density)]
    meta = {"s": params.s, "n": state.level, "energy": state.energy, "method": method,
            "lattice_spacing": profile.spacing, "sup_deviation": profile.deviation(),
            "lattice_integral": profile.lattice_integral(), "lattice_points": len(profile.lattice_z),
            "continuum_points": len(profile.continuum_z)}
    return Report("profile", rows, meta)


def cmd_bound(cfg) -> Report:
    """Free-fall and enhanced-gravity bounds on lambda, plus the height comparison."""
    exp = cfg.EXPERIMENT
    ctx = PhysicalContext.from_config(cfg.PHYSICS)
    g_factors = [1.0] if exp.G_FACTOR == 1 else [1.0, float(exp.G_FACTOR)]
    reports = bound_table(list(exp.LEVELS), list(exp.DELTA_E_EXP_PEV), g_factors, ctx)
    rows = [dict(r.as_row(), method="perturbative-shift") for r in reports]
    heights = {}
    for combine in ("quadrature", "linear"):
        heights[combine] = [check._asdict() for check in height_containment(ctx, combine)]
    meta = {"heights": heights, "heights_combine": exp.HEIGHTS_COMBINE}
    return Report("bound", rows, meta)


def cmd_lifetime(cfg) -> Report:
    """Omega_n, tau_n and the vibration bound for VIBRATION.LEVEL."""
    vib = cfg.VIBRATION
    ctx = PhysicalContext.from_config(cfg.PHYSICS)
    report = vibration_lifetime_report(int(vib.LEVEL), vib.T_N, vib.DELTA_T_EXP, DimensionlessParams(vib.S),
                                       VibrationSpectrumModel.constant(vib.S_A), ctx,
                                       n_max=vib.N_SUM_MAX, upsilon_power=vib.UPSILON_POWER)
    row = dict(report.as_row(), method="continuum-sum")
    meta = {"s_a": vib.S_A, "n_sum_max": vib.N_SUM_MAX, "upsilon_power": vib.UPSILON_POWER}
    return Report("lifetime", [row], meta)


def cmd_rate(cfg) -> Report:
    """Quadrupole rate and polymer ratio over RADIATIVE.S_SWEEP."""
    rad = cfg.RADIATIVE
    ctx = PhysicalContext.from_config(cfg.PHYSICS)
    report = quadrupole_report(int(rad.FROM_LEVEL), int(rad.TO_LEVEL), ctx, rad.S_SWEEP,
                               int(rad.L), int(rad.QUADRUPOLE_POWER))
    rows = [dict(r, method="first-order") for r in report.rows()]
    meta = {"coefficient": report.coefficient,
            "coefficients_by_power": {str(p): c for p, c in sorted(report.coefficients_by_power.items())},
            "log10_rate_qm": math.log10(report.rate_qm)}
    return Report("rate", rows, meta)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "profile": cmd_profile,
    "bound": cmd_bound,
    "lifetime": cmd_lifetime,
    "rate": cmd_rate,
}


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    columns = report.columns
    writer.writerow(columns)
    for row in report.rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _to_json(report: Report) -> str:
    payload = {"command": report.command, "metadata": report.metadata, "rows": report.rows}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _to_table(report: Report) -> str:
    columns = report.columns
    cells = [[_cell(row.get(c)) for c in columns] for row in report.rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells)
    for key in sorted(report.metadata):
        lines.append(f"# {key}: {json.dumps(report.metadata[key], sort_keys=True)}")
    return "\n".join(lines) + "\n"


_WRITERS = {"csv": _to_csv, "json": _to_json, "table": _to_table}


def render(report: Report, fmt: str = "csv") -> str:
    writer = _WRITERS.get(fmt)
    if writer is None:
        raise ConfigError(f"unknown output format {fmt!r}")
    return writer(report)


def write_report(report: Report, fmt: str = "csv", out: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """Write to ``out`` (LF line endings) or to ``stream``."""
    text = render(report, fmt)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        logger.info("wrote %d rows to %s", len(report.rows), path)
    else:
        (stream or sys.stdout).write(text)

"""Aligning backend sweeps, error metrics and plot-ready tables."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reference
from .errors import MissingInputError, ValidationError

log = logging.getLogger(__name__)

EXACT = "exact"
VQE = "vqe"
HARDWARE_NAMES = ("noisy", "hardware")
DEFAULT_WINDOW = reference.CRITICAL_WINDOW
GRID_TOL = 1e-9
DECIMALS = 4

ORDER_DEFINITIONS = {
    EXACT: "sqrt of N^-2-averaged <Z_i Z_j> correlations",
    "default": "|N^-1 sum_i <Z_i>|",
}

FIGURES = ("energy_compare", "order_compare", "hw_mz", "hw_energy", "hw_zz")


@dataclass(frozen=True)
class SweepRow:
    h: float
    energy: float
    mz: float
    energy_err: float | None = None
    mz_err: float | None = None
    x_mean: float | None = None
    zz_mean: float | None = None


@dataclass(frozen=True)
class MetricsReport:
    backend: str
    mae_mz: float
    rmse_mz: float
    mae_energy: float
    rmse_energy: float
    mae_mz_crit: float | None
    mae_energy_crit: float | None
    window: tuple
    n_window: int


@dataclass
class SweepReport:
    grid: tuple
    backends: dict
    hierarchy: list | None = None
    hardware: str | None = None
    provenance: dict = field(default_factory=dict)

    def rows(self, name):
        if name not in self.backends:
            raise ValidationError(f"report has no {name!r} series")
        return self.backends[name]

    def definition(self, name):
        text = ORDER_DEFINITIONS.get(name, ORDER_DEFINITIONS["default"])
        variant = self.provenance.get("order_parameter_variant")
        if name == EXACT and variant:
            text = f"{text} ({variant})"
        return text


def _check_grid(a, b, what="grid"):
    ha = np.array([r.h for r in a])
    hb = np.array([r.h for r in b])
    if ha.shape != hb.shape or not np.allclose(ha, hb, rtol=0.0, atol=GRID_TOL):
        raise ValidationError(f"{what} mismatch: {ha.tolist()} vs {hb.tolist()}")


def _mae(d):
    return float(np.mean(np.abs(d)))


def _rmse(d):
    return float(np.sqrt(np.mean(d * d)))


def compute_metrics(reference_rows, candidate_rows, window=DEFAULT_WINDOW, backend="") -> MetricsReport:
    """MAE / RMSE of the candidate against the reference, plus critical-window MAE.

    Window endpoints are inclusive. When no grid point falls inside the
    window the critical metrics are ``None`` and a warning is logged.
    """
    _check_grid(reference_rows, candidate_rows)
    if not reference_rows:
        raise ValidationError("empty sweep")
    lo, hi = window
    h = np.array([r.h for r in reference_rows])
    de = np.array([c.energy - r.energy for r, c in zip(reference_rows, candidate_rows)])
    dm = np.array([c.mz - r.mz for r, c in zip(reference_rows, candidate_rows)])
    inside = (h >= lo - GRID_TOL) & (h <= hi + GRID_TOL)
    if inside.any():
        mz_crit, e_crit = _mae(dm[inside]), _mae(de[inside])
    else:
        log.warning("no grid point inside critical window [%g, %g]; window metrics omitted", lo, hi)
        mz_crit = e_crit = None
    return MetricsReport(backend, _mae(dm), _rmse(dm), _mae(de), _rmse(de),
                         mz_crit, e_crit, (float(lo), float(hi)), int(inside.sum()))


def hardware_name(backends):
    for name in HARDWARE_NAMES:
        if name in backends:
            return name
    return None


def assemble_report(exact_rows, vqe_rows=None, backend_rows=None, sigma=3.0, provenance=None):
    """Align all series on the exact grid and flag the energy ordering per point.

    The ordering checked is ``E_exact <= E_vqe <= E_hw + sigma * err_hw``;
    rows without an error bar are compared strictly. ``hierarchy`` is
    ``None`` when there is no variational series.
    """
    backends = {EXACT: tuple(exact_rows)}
    if vqe_rows is not None:
        _check_grid(exact_rows, vqe_rows, "vqe grid")
        backends[VQE] = tuple(vqe_rows)
    for name, rows in (backend_rows or {}).items():
        _check_grid(exact_rows, rows, f"{name} grid")
        backends[name] = tuple(rows)
    hw = hardware_name(backends)
    hierarchy = None
    if VQE in backends:
        hierarchy = []
        for k, ex in enumerate(exact_rows):
            v = backends[VQE][k]
            ok = ex.energy <= v.energy + GRID_TOL
            if hw is not None:
                r = backends[hw][k]
                ok = ok and v.energy <= r.energy + sigma * (r.energy_err or 0.0)
            hierarchy.append(bool(ok))
    return SweepReport(tuple(r.h for r in exact_rows), backends, hierarchy, hw,
                       dict(provenance or {}))


# rendering -------------------------------------------------------------------

def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.{DECIMALS}f}"


def _table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _has(rows, attr):
    return all(getattr(r, attr) is not None for r in rows)


def sweep_table(report: SweepReport) -> str:
    header = ["h_over_j"]
    columns = []
    for name, rows in report.backends.items():
        for attr in ("energy", "energy_err", "mz", "mz_err"):
            if attr in ("energy", "mz") or _has(rows, attr):
                header.append(f"{attr}_{name}")
                columns.append([getattr(r, attr) for r in rows])
    if report.hierarchy is not None:
        header.append("hierarchy_ok")
        columns.append(report.hierarchy)
    body = [[h] + [c[k] for c in columns] for k, h in enumerate(report.grid)]
    return _table(header, body)


def metrics_table(reports) -> str:
    header = ["backend", "mae_mz", "rmse_mz", "mae_energy", "rmse_energy",
              "mae_mz_crit", "mae_energy_crit", "window_lo", "window_hi", "n_window"]
    body = [[m.backend, m.mae_mz, m.rmse_mz, m.mae_energy, m.rmse_energy, m.mae_mz_crit,
             m.mae_energy_crit, m.window[0], m.window[1], m.n_window] for m in reports]
    return _table(header, body)


def emit_figure_data(report: SweepReport, which: str, hardware=None) -> str:
    """Comma-separated plot data with a header row; ``h_over_j`` is always the first column."""
    if which not in FIGURES:
        raise ValidationError(f"unknown figure {which!r}; choose from {FIGURES}")
    if which in ("energy_compare", "order_compare"):
        attr = "energy" if which == "energy_compare" else "mz"
        header, columns = ["h_over_j"], []
        for name, rows in report.backends.items():
            header.append(f"{attr}_{name}")
            columns.append([getattr(r, attr) for r in rows])
            if _has(rows, f"{attr}_err"):
                header.append(f"{attr}_{name}_err")
                columns.append([getattr(r, f"{attr}_err") for r in rows])
        if not columns:
            raise ValidationError("no series to plot")
        body = [[h] + [c[k] for c in columns] for k, h in enumerate(report.grid)]
        return _table(header, body)

    hw = hardware or report.hardware
    if hw is None or hw not in report.backends:
        raise ValidationError(f"figure {which} needs a hardware-like series")
    rows = report.backends[hw]
    attr, label = {"hw_mz": ("mz", "abs_mz"), "hw_energy": ("energy", "energy"),
                   "hw_zz": ("zz_mean", "zz_mean")}[which]
    if not _has(rows, attr):
        raise ValidationError(f"series {hw!r} has no {attr} values")
    header = ["h_over_j", label]
    err_attr = f"{attr}_err"
    with_err = hasattr(rows[0], err_attr) and _has(rows, err_attr)
    if with_err:
        header.append(f"{label}_err")
    body = [[r.h, getattr(r, attr)] + ([getattr(r, err_attr)] if with_err else []) for r in rows]
    return _table(header, body)


# full-precision row files ----------------------------------------------------

ROW_FIELDS = ("backend", "h", "energy", "energy_err", "mz", "mz_err", "x_mean", "zz_mean")


def _num(x):
    return "" if x is None else repr(float(x))


def write_rows(path, named_rows):
    """Write ``{backend: rows}`` as CSV at full float precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for name, rows in named_rows.items():
        for r in rows:
            w.writerow([name, _num(r.h), _num(r.energy), _num(r.energy_err), _num(r.mz),
                        _num(r.mz_err), _num(r.x_mean), _num(r.zz_mean)])
    Path(path).write_text(buf.getvalue())


def read_rows(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"row file not found: {path}")
    out = {}
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"backend", "h", "energy", "mz"} - set(reader.fieldnames or ())
        if missing:
            raise ValidationError(f"{path}: missing columns {sorted(missing)}")

        def opt(row, key):
            v = (row.get(key) or "").strip()
            return float(v) if v else None

        for row in reader:
            out.setdefault(row["backend"], []).append(SweepRow(
                h=float(row["h"]), energy=float(row["energy"]), mz=float(row["mz"]),
                energy_err=opt(row, "energy_err"), mz_err=opt(row, "mz_err"),
                x_mean=opt(row, "x_mean"), zz_mean=opt(row, "zz_mean")))
    for name in out:
        out[name].sort(key=lambda r: r.h)
    return out


def reference_rows() -> dict:
    """The bundled published values as ``{exact, vqe, hardware}`` row lists."""
    hw_extra = {row[0]: row for row in reference.HARDWARE_OBSERVABLES}
    exact, vqe, hw = [], [], []
    for h, mz_ex, mz_v, mz_hw, e_ex, e_v, e_hw in reference.SWEEP:
        exact.append(SweepRow(h, e_ex, mz_ex))
        vqe.append(SweepRow(h, e_v, mz_v))
        _, _, x_mean, zz_mean, _ = hw_extra[h]
        hw.append(SweepRow(h, e_hw, mz_hw, x_mean=x_mean, zz_mean=zz_mean))
    return {EXACT: exact, VQE: vqe, "hardware": hw}


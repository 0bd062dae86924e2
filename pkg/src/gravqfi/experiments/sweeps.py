"""Sweep drivers producing one row per grid point, plus CSV emission."""

from __future__ import annotations

import io
import math
import sys
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, TextIO

from .. import dynamics, metrology
from ..gaussian import GaussianState, make_probe, purity
from .config import ConfigError, SweepConfig


@dataclass(frozen=True)
class SweepRow:
    probe_name: str
    t: float
    lambda_g: float
    purity: float
    qfi_total: float
    qfi_term_cov: float
    qfi_term_purity: float
    cfi_best_theta: float
    crb: float


CFI_SLACK = 1e-12
# "short time" for probe rankings: one hundredth of a damping time
SHORT_TIME_IN_DAMPING_TIMES = 0.01

COLUMNS = tuple(f.name for f in fields(SweepRow))


def evaluate_point(
    name: str, s0: GaussianState, t: float, p: dynamics.PhysicalParams, n_repetitions: int
) -> SweepRow:
    state = dynamics.evolve(s0, t, p)
    q = metrology.qfi(s0, t, p)
    cfi, _ = metrology.best_homodyne_cfi(s0, t, p)
    if cfi > q.total + CFI_SLACK:
        raise RuntimeError(f"homodyne CFI {cfi!r} exceeds QFI {q.total!r} at t={t!r}")
    if q.total > 0:
        crb = metrology.cramer_rao(q.total, n_repetitions).variance_bound
    else:
        crb = math.inf
    return SweepRow(
        probe_name=name,
        t=float(t),
        lambda_g=p.lambda_g,
        purity=purity(state.cov),
        qfi_total=q.total,
        qfi_term_cov=q.term_cov,
        qfi_term_purity=q.term_purity,
        cfi_best_theta=cfi,
        crb=crb,
    )


def _time_rows(cfg: SweepConfig) -> list[SweepRow]:
    rows = []
    times = cfg.time_grid.points()
    for name, spec in cfg.all_probes().items():
        s0 = make_probe(spec)
        rows.extend(evaluate_point(name, s0, t, cfg.params, cfg.n_repetitions) for t in times)
    return rows


def run_purity_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """Purity against time for every probe (other columns are filled too)."""
    return _time_rows(cfg)


def run_qfi_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """QFI breakdown, best homodyne CFI and Cramer-Rao bound against time."""
    return _time_rows(cfg)


def run_qfi_contour(cfg: SweepConfig) -> list[SweepRow]:
    """QFI over (t, lambda_g) for ``cfg.contour_probe``, t-major order."""
    if cfg.lambda_g_grid is None:
        raise ConfigError("qfi-contour needs a lambda_g grid", field="lambda_g_grid")
    probes = cfg.all_probes()
    if cfg.contour_probe not in probes:
        raise ConfigError(
            f"unknown probe {cfg.contour_probe!r}; have {sorted(probes)}",
            field="contour.probe",
        )
    s0 = make_probe(probes[cfg.contour_probe])
    lambdas = cfg.lambda_g_grid.points()
    param_slices = [cfg.params.with_lambda_g(float(lg)) for lg in lambdas]
    return [
        evaluate_point(cfg.contour_probe, s0, t, p, cfg.n_repetitions)
        for t in cfg.time_grid.points()
        for p in param_slices
    ]


def optimal_time(rows: Iterable[SweepRow], probe_name: str) -> float:
    """Grid time with the largest QFI for one probe (first one on ties)."""
    best = None
    for row in rows:
        if row.probe_name == probe_name and (best is None or row.qfi_total > best.qfi_total):
            best = row
    if best is None:
        raise KeyError(probe_name)
    return best.t


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return f"{value:.11e}"


def write_csv(rows: Iterable[SweepRow], out: TextIO) -> None:
    out.write(",".join(COLUMNS) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in astuple(row)) + "\n")


def to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def emit(rows: list[SweepRow], path: str | None) -> None:
    if path is None or path == "-":
        write_csv(rows, sys.stdout)
        return
    Path(path).write_text(to_csv(rows))

"""Self-check: every closed form against an independent numerical route.

Suites call through module attributes (``dynamics.evolve`` and so on) so a
patched implementation is what gets checked.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from .. import dynamics, gaussian, metrology

N_DRAWS = 20


@dataclass(frozen=True)
class SuiteResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error < self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: max error {self.max_error:.3e} (tol {self.tolerance:.0e})"


@dataclass(frozen=True)
class Case:
    probe: gaussian.ProbeSpec
    params: dynamics.PhysicalParams
    t: float

    @property
    def state(self) -> gaussian.GaussianState:
        return gaussian.make_probe(self.probe)


def draw_probe(rng: np.random.Generator) -> gaussian.ProbeSpec:
    kind = int(rng.integers(4))
    if kind == 0:
        return gaussian.Coherent(*rng.uniform(-2, 2, size=2))
    if kind == 1:
        return gaussian.Thermal(rng.uniform(0, 4))
    if kind == 2:
        return gaussian.SqueezedVacuum(rng.uniform(0, 1.5), rng.uniform(0, 2 * math.pi))
    return gaussian.SqueezedThermal(
        rng.uniform(0, 2), rng.uniform(0, 1.2), rng.uniform(0, 2 * math.pi)
    )


def draw_params(rng: np.random.Generator) -> dynamics.PhysicalParams:
    """Random parameters with lambda_g in [1e-3, 1e-1] gamma.

    Far smaller lambda_g would put the fidelity and finite-difference checks
    below double-precision resolution of sigma(lambda_g +/- eps).
    """
    gamma = rng.uniform(0.05, 0.5)
    return dynamics.PhysicalParams(
        omega_m=rng.uniform(0.5, 2.0),
        gamma=gamma,
        n_th=rng.uniform(0, 2),
        lambda_g=gamma * 10 ** rng.uniform(-3, -1),
        lambda_T=gamma * rng.uniform(0, 0.02),
    )


def draw_cases(
    rng: np.random.Generator, n: int, t_range=(0.0, 10.0), log_t: bool = False
) -> list[Case]:
    """Random (probe, params, t) with t given in damping times 1/gamma."""
    cases = []
    for _ in range(n):
        probe, params = draw_probe(rng), draw_params(rng)
        lo, hi = t_range
        u = 10 ** rng.uniform(math.log10(lo), math.log10(hi)) if log_t else rng.uniform(lo, hi)
        cases.append(Case(probe, params, u / params.gamma))
    return cases


def near_pure_cases() -> list[Case]:
    p = dynamics.PhysicalParams(lambda_g=1e-4)
    return [
        Case(probe, p, u / p.gamma)
        for probe in (gaussian.Coherent(2.0, 0.0), gaussian.SqueezedVacuum(1.4436, 0.0))
        for u in (1e-5, 1e-4)
    ]


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def suite_energy() -> SuiteResult:
    err = max(
        abs(gaussian.energy(gaussian.make_probe(spec)) - 4.0)
        for spec in gaussian.TABLE_I_PROBES.values()
    )
    return SuiteResult("table_i_energy", err, 1e-3)


def suite_ode(rng: np.random.Generator, n: int = N_DRAWS) -> SuiteResult:
    err = 0.0
    for case in draw_cases(rng, n):
        closed = dynamics.evolve(case.state, case.t, case.params)
        numeric = dynamics.moment_ode_oracle(case.state, case.t, case.params)
        err = max(err, closed.max_abs_diff(numeric))
    return SuiteResult("ode_vs_closed_form", err, 1e-8)


def suite_fidelity_qfi(rng: np.random.Generator, n: int = N_DRAWS) -> SuiteResult:
    """QFI formula vs Bures-metric finite difference, plus a Richardson check.

    Times are log-uniform down to 1e-3 damping times, and fixed cases a few
    1e-5 damping times after preparing a pure probe pin down the purity
    term where 1 - P^4 is tiny.
    """
    err = 0.0
    for case in draw_cases(rng, n, t_range=(1e-3, 10.0), log_t=True) + near_pure_cases():
        p = case.params
        exact = metrology.qfi(case.state, case.t, p).total
        eps = metrology.default_fidelity_eps(p)
        coarse = metrology.qfi_fidelity_oracle(case.state, case.t, p, eps)
        fine = metrology.qfi_fidelity_oracle(case.state, case.t, p, eps / 2)
        err = max(err, abs(fine - exact) / abs(fine), abs(fine - coarse) / abs(fine))
    return SuiteResult("fidelity_qfi_vs_formula", err, 1e-4)


def fd_dsigma(case: Case) -> np.ndarray:
    p = case.params
    h = metrology.default_fidelity_eps(p)
    up = dynamics.evolve(case.state, case.t, p.with_lambda_g(p.lambda_g + h)).cov.as_array()
    down = dynamics.evolve(case.state, case.t, p.with_lambda_g(p.lambda_g - h)).cov.as_array()
    return (up - down) / (2 * h)


def fd_dpurity(case: Case) -> float:
    p = case.params
    h = metrology.default_fidelity_eps(p)

    def P(lg):
        return gaussian.purity(dynamics.evolve(case.state, case.t, p.with_lambda_g(lg)).cov)

    return (P(p.lambda_g + h) - P(p.lambda_g - h)) / (2 * h)


def suite_derivatives(rng: np.random.Generator, n: int = N_DRAWS) -> SuiteResult:
    err = 0.0
    for case in draw_cases(rng, n, t_range=(0.0, 10.0)):
        case = Case(case.probe, case.params, max(case.t, 0.1))
        analytic = metrology.dsigma_dlambda_g(case.t, case.params).as_array()
        err = max(err, _rel(fd_dsigma(case), analytic))
        dP = metrology.dpurity_dlambda_g(case.t, case.state, case.params)
        err = max(err, abs(fd_dpurity(case) - dP) / abs(dP))
    return SuiteResult("analytic_vs_fd_derivatives", err, 1e-6)


def suite_cfi_bound(rng: np.random.Generator, n: int = N_DRAWS) -> SuiteResult:
    """Largest homodyne CFI excess over the QFI (must stay below 1e-12)."""
    excess = -math.inf
    grid = metrology.theta_grid()
    for case in draw_cases(rng, n, t_range=(1e-3, 10.0), log_t=True):
        q = metrology.qfi(case.state, case.t, case.params).total
        cfi = metrology.homodyne_cfi(case.state, case.t, case.params, grid)
        excess = max(excess, float(np.max(cfi)) - q)
    return SuiteResult("homodyne_cfi_le_qfi", max(excess, 0.0), 1e-12)


def suite_bona_fide(rng: np.random.Generator, n_params: int = 5) -> SuiteResult:
    """Worst value of 1/4 - det sigma(t) over Table I probes, 200 times in [0, 20/gamma]."""
    worst = -math.inf
    param_sets = [dynamics.PhysicalParams()] + [draw_params(rng) for _ in range(n_params)]
    for p in param_sets:
        times = np.linspace(0, 20 / p.gamma, 200)
        for spec in gaussian.TABLE_I_PROBES.values():
            s0 = gaussian.make_probe(spec)
            for t in times:
                try:
                    c = dynamics.evolve(s0, float(t), p).cov
                except gaussian.NonPhysicalStateError:
                    return SuiteResult("bona_fide_preservation", math.inf, 1e-10)
                worst = max(worst, 0.25 - c.det)
    # tolerance is on the deficit: passes when det >= 1/4 - 1e-10
    return SuiteResult("bona_fide_preservation", max(worst, 0.0), 1e-10)


def suite_steady_state(rng: np.random.Generator, n: int = N_DRAWS) -> SuiteResult:
    err = 0.0
    for _ in range(n):
        p = draw_params(rng)
        A, B = dynamics.steady_state_terms(p)
        err = max(err, abs(B / A + 2 * p.quality_factor) / (2 * p.quality_factor))
        long_time = dynamics.evolve(dynamics.steady_state(p), 50 / p.gamma, p)
        err = max(err, long_time.max_abs_diff(dynamics.steady_state(p)))
    return SuiteResult("steady_state_identities", err, 1e-10)


SUITES: list[tuple[str, Callable]] = [
    ("energy", lambda rng: suite_energy()),
    ("ode", suite_ode),
    ("fidelity", suite_fidelity_qfi),
    ("derivatives", suite_derivatives),
    ("cfi", suite_cfi_bound),
    ("bona_fide", suite_bona_fide),
    ("steady", suite_steady_state),
]


def run_validation(seed: int = 0) -> list[SuiteResult]:
    results = []
    for _, suite in SUITES:
        rng = np.random.default_rng(seed)
        try:
            results.append(suite(rng))
        except Exception as exc:  # a crashing suite is a failing suite
            name = getattr(suite, "__name__", "suite").removeprefix("suite_")
            results.append(SuiteResult(f"{name} (raised {type(exc).__name__}: {exc})", math.inf, 0.0))
    return results


def validate(seed: int = 0, out: TextIO | None = None) -> int:
    """Run every suite, print one line each; return 0 iff all pass, else 1."""
    out = out or sys.stdout
    results = run_validation(seed)
    for r in results:
        print(r.line(), file=out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"validation FAILED: {', '.join(failed)}", file=out)
        return 1
    print(f"all {len(results)} suites passed", file=out)
    return 0

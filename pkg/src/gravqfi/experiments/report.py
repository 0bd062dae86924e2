from __future__ import annotations

from .. import dynamics, metrology
from ..gaussian import purity


def steady_state_summary(p: dynamics.PhysicalParams) -> dict[str, float | None]:
    A, B = dynamics.steady_state_terms(p)
    return {
        "n_eff": p.n_eff,
        "A_inf": A,
        "B_inf": B,
        "B_inf/A_inf": B / A if A != 0 else None,
        "Q": p.quality_factor,
        "steady_purity": purity(dynamics.steady_state(p).cov),
        "steady_qfi": metrology.steady_qfi(p).total,
    }


def report_steady_state(p: dynamics.PhysicalParams) -> str:
    """Text report of the stationary state; floats are printed round-trip exact."""
    lines = [
        f"omega_m = {p.omega_m!r}",
        f"gamma = {p.gamma!r}",
        f"n_th = {p.n_th!r}",
        f"lambda_g = {p.lambda_g!r}",
        f"lambda_T = {p.lambda_T!r}",
    ]
    for key, value in steady_state_summary(p).items():
        if value is None:
            lines.append(f"{key} = undefined (Lambda = 0)")
        else:
            lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, float | None]:
    out: dict[str, float | None] = {}
    for line in text.splitlines():
        key, _, value = line.partition(" = ")
        try:
            out[key] = float(value)
        except ValueError:
            out[key] = None
    return out

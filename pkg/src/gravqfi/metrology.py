"""Fisher information for the gravitational diffusion rate lambda_g."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import dynamics
from .gaussian import CovMat2, GaussianState, purity

PURE_STATE_TOL = 1e-12
THETA_GRID_SIZE = 64


class ModelInconsistencyError(RuntimeError):
    """Pure evolved state whose purity still depends on lambda_g."""


class NotIdentifiableError(ValueError):
    pass


@dataclass(frozen=True)
class QfiBreakdown:
    term_cov: float
    term_purity: float
    term_disp: float

    @property
    def total(self) -> float:
        return self.term_cov + self.term_purity + self.term_disp


@dataclass(frozen=True)
class CrbReport:
    qfi: float
    n_repetitions: int
    variance_bound: float


def dsigma_dlambda_g(t: float, p: dynamics.PhysicalParams) -> CovMat2:
    """Analytic derivative of sigma(t) with respect to lambda_g.

    Only the noise part depends on lambda_g; A and B are linear in the total
    diffusion rate, so their derivatives are the Lambda-free shape factors.
    """
    dynamics._check_time(t)
    one_minus_decay, a, b = dynamics._noise_shape(t, p)
    dN = one_minus_decay * 2 / p.gamma
    return CovMat2(xx=dN + a, xp=b, pp=dN - a)


def dmean_dlambda_g(t: float, s0: GaussianState, p: dynamics.PhysicalParams) -> np.ndarray:
    # mean(t) = S(t) mean(0) and S(t) carries no lambda_g dependence
    dynamics._check_time(t)
    return np.zeros(2)


def _dpurity(P: float, sigma_inv: np.ndarray, dsigma: np.ndarray) -> float:
    # Jacobi: d det = det Tr(sigma^-1 dsigma), and P ~ det^-1/2
    return -0.5 * P * float(np.trace(sigma_inv @ dsigma))


def dpurity_dlambda_g(t: float, s0: GaussianState, p: dynamics.PhysicalParams) -> float:
    cov = dynamics.evolve(s0, t, p).cov
    return _dpurity(purity(cov), cov.inverse(), dsigma_dlambda_g(t, p).as_array())


def _purity_term(det: float, dP: float) -> float:
    """2 dP^2 / (1 - P^4), with 1 - P^4 formed from det to avoid cancellation."""
    four_det = 4 * det
    one_minus_p4 = (four_det - 1) * (four_det + 1) / (four_det * four_det)
    if one_minus_p4 < PURE_STATE_TOL:
        if abs(dP) < PURE_STATE_TOL:
            return 0.0
        raise ModelInconsistencyError(
            f"evolved state is pure (1 - P^4 = {one_minus_p4:.3g}) but dP/dlambda_g = {dP:.3g}"
        )
    return 2 * dP * dP / one_minus_p4


def qfi_from_moments(cov: CovMat2, dsigma: np.ndarray, dmean: np.ndarray) -> QfiBreakdown:
    """Single-mode Gaussian QFI from sigma, d sigma and d mean.

    Term by term: Tr[(sigma^-1 dsigma)^2] / (2 (1 + P^2)), 2 dP^2 / (1 - P^4) and
    dmean^T sigma^-1 dmean.
    """
    sigma_inv = cov.inverse()
    P = purity(cov)
    M = sigma_inv @ dsigma
    term_cov = float(np.trace(M @ M)) / (2 * (1 + P * P))
    term_purity = _purity_term(cov.det, _dpurity(P, sigma_inv, dsigma))
    term_disp = float(dmean @ sigma_inv @ dmean)
    return QfiBreakdown(term_cov, term_purity, term_disp)


def qfi(s0: GaussianState, t: float, p: dynamics.PhysicalParams) -> QfiBreakdown:
    """Quantum Fisher information of the evolved state with respect to lambda_g."""
    cov = dynamics.evolve(s0, t, p).cov
    return qfi_from_moments(
        cov, dsigma_dlambda_g(t, p).as_array(), dmean_dlambda_g(t, s0, p)
    )


def dsigma_inf_dlambda_g(p: dynamics.PhysicalParams) -> CovMat2:
    g, w = p.gamma, p.omega_m
    den = g * g + 4 * w * w
    dN, dA, dB = 2 / g, 2 * g / den, -4 * w / den
    return CovMat2(xx=dN + dA, xp=dB, pp=dN - dA)


def steady_qfi(p: dynamics.PhysicalParams) -> QfiBreakdown:
    """QFI of the stationary state, which no longer depends on the probe."""
    return qfi_from_moments(
        dynamics.steady_state(p).cov, dsigma_inf_dlambda_g(p).as_array(), np.zeros(2)
    )


def gaussian_fidelity(s1: GaussianState, s2: GaussianState, dps: int | None = None):
    """Uhlmann fidelity F = (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 of two one-mode Gaussians.

    With ``dps`` set, evaluation is done in mpmath at that many digits and an
    mpf is returned; the inputs themselves are still doubles.
    """
    if dps is None:
        return _fidelity(s1, s2, float, math.exp, math.sqrt)
    with mpmath.workdps(dps):
        return _fidelity(s1, s2, mpmath.mpf, mpmath.exp, mpmath.sqrt)


def _fidelity(s1, s2, sq, ex, sqrt):
    a1, c1, b1 = map(sq, (s1.cov.xx, s1.cov.xp, s1.cov.pp))
    a2, c2, b2 = map(sq, (s2.cov.xx, s2.cov.xp, s2.cov.pp))
    dx = sq(s1.mean.x) - sq(s2.mean.x)
    dp = sq(s1.mean.p) - sq(s2.mean.p)
    sa, sc, sb = a1 + a2, c1 + c2, b1 + b2
    big_delta = sa * sb - sc * sc
    det1 = a1 * b1 - c1 * c1
    det2 = a2 * b2 - c2 * c2
    small_delta = (4 * det1 - 1) * (4 * det2 - 1) / 4
    if small_delta < 0:
        small_delta = small_delta * 0  # rounding on pure states
    quad = (sb * dx * dx - 2 * sc * dx * dp + sa * dp * dp) / big_delta
    # sqrt(D + d) - sqrt(d) rationalized
    denom = big_delta / (sqrt(big_delta + small_delta) + sqrt(small_delta))
    return ex(-quad / 2) / denom


def default_fidelity_eps(p: dynamics.PhysicalParams) -> float:
    return 1e-3 * max(p.lambda_g, 1e-9)


def qfi_fidelity_oracle(
    s0: GaussianState, t: float, p: dynamics.PhysicalParams, eps: float | None = None
) -> float:
    """QFI from the Bures metric: 8 (1 - sqrt F(rho_-, rho_+)) / (2 eps)^2.

    The two states sit at lambda_g -/+ eps. The fidelity is evaluated at
    50 digits because 1 - sqrt F is of order eps^2.
    """
    if eps is None:
        eps = default_fidelity_eps(p)
    if not eps > 0 or p.lambda_g - eps < 0:
        raise ValueError(f"eps={eps} must be positive and keep lambda_g - eps >= 0")
    lo = dynamics.evolve(s0, t, p.with_lambda_g(p.lambda_g - eps))
    hi = dynamics.evolve(s0, t, p.with_lambda_g(p.lambda_g + eps))
    with mpmath.workdps(50):
        F = gaussian_fidelity(lo, hi, dps=50)
        gap = 1 - mpmath.sqrt(F)
        return float(8 * gap / (2 * mpmath.mpf(eps)) ** 2)


def homodyne_cfi(s0: GaussianState, t: float, p: dynamics.PhysicalParams, theta):
    """Classical Fisher information of a homodyne measurement at angle ``theta``.

    The outcome is Gaussian with variance v = c^T sigma c, c = (cos, sin), and a
    lambda_g-independent mean, giving (dv)^2 / (2 v^2). ``theta`` may be an array.
    """
    cov = dynamics.evolve(s0, t, p).cov
    ds = dsigma_dlambda_g(t, p)
    th = np.asarray(theta, dtype=float)
    c, s = np.cos(th), np.sin(th)
    v = cov.xx * c * c + 2 * cov.xp * c * s + cov.pp * s * s
    dv = ds.xx * c * c + 2 * ds.xp * c * s + ds.pp * s * s
    out = dv * dv / (2 * v * v)
    return float(out) if out.ndim == 0 else out


def theta_grid(n: int = THETA_GRID_SIZE) -> np.ndarray:
    return np.arange(n) * (math.pi / n)


def best_homodyne_cfi(
    s0: GaussianState, t: float, p: dynamics.PhysicalParams, n_theta: int = THETA_GRID_SIZE
) -> tuple[float, float]:
    """(max CFI, argmax angle) over a uniform grid on [0, pi)."""
    grid = theta_grid(n_theta)
    values = homodyne_cfi(s0, t, p, grid)
    k = int(np.argmax(values))
    return float(values[k]), float(grid[k])


def cramer_rao(qfi_total: float, n: int = 1) -> CrbReport:
    """Quantum Cramer-Rao bound 1 / (n F) on the variance of an unbiased estimator."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    if not qfi_total > 0:
        raise NotIdentifiableError("parameter not identifiable at this point")
    n = int(n)
    return CrbReport(qfi=qfi_total, n_repetitions=n, variance_bound=1.0 / (n * qfi_total))

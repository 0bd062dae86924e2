"""Closed-form Gaussian evolution under gravitational plus thermal decoherence.

The mechanical mode obeys a Lindblad equation with damping rate ``gamma``
towards a bath of occupation ``n_th`` and position diffusion of total rate
``Lambda = lambda_g + lambda_T``. Its first and second moments obey

    d<b>/dt     = -(i omega_m + gamma/2) <b>
    d<b^dag b>/dt = -gamma <b^dag b> + gamma n_eff,   n_eff = n_th + 2 Lambda / gamma
    d<b^2>/dt   = -(2 i omega_m + gamma) <b^2> + 2 Lambda

which integrate to a damped phase-space rotation plus an accumulated noise
covariance. ``moment_ode_oracle`` integrates the same equations numerically
and shares no code with the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .gaussian import CovMat2, Displacement2, GaussianState

G_NEWTON = 6.67430e-11  # m^3 kg^-1 s^-2
K_BOLTZMANN = 1.380649e-23  # J / K
HBAR = 1.054571817e-34  # J s


def _finite(name, value):
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Oscillator and bath parameters, all rates in s^-1.

    Defaults: omega_m = 1, gamma = 0.1 (Q = 10), n_th = 0.5, lambda_g = 1e-8
    and no thermal diffusion.
    """

    omega_m: float = 1.0
    gamma: float = 0.1
    n_th: float = 0.5
    lambda_g: float = 1e-8
    lambda_T: float = 0.0

    def __post_init__(self):
        for name in ("omega_m", "gamma", "n_th", "lambda_g", "lambda_T"):
            _finite(name, getattr(self, name))
        if self.omega_m <= 0:
            raise ValueError(f"omega_m must be > 0, got {self.omega_m}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        for name in ("n_th", "lambda_g", "lambda_T"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def lambda_total(self) -> float:
        return self.lambda_g + self.lambda_T

    @property
    def n_eff(self) -> float:
        return self.n_th + 2 * self.lambda_total / self.gamma

    @property
    def quality_factor(self) -> float:
        return self.omega_m / self.gamma

    def with_lambda_g(self, lambda_g: float) -> "PhysicalParams":
        return replace(self, lambda_g=lambda_g)


@dataclass(frozen=True)
class MirrorSpec:
    density: float  # kg m^-3
    omega_m: float

    def __post_init__(self):
        _finite("density", self.density)
        _finite("omega_m", self.omega_m)
        if self.density < 0:
            raise ValueError("density must be >= 0")
        if self.omega_m <= 0:
            raise ValueError("omega_m must be > 0")


@dataclass(frozen=True)
class BathSpec:
    temperature: float  # K
    gamma: float
    omega_m: float

    def __post_init__(self):
        for name in ("temperature", "gamma", "omega_m"):
            _finite(name, getattr(self, name))
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.gamma <= 0 or self.omega_m <= 0:
            raise ValueError("gamma and omega_m must be > 0")


@dataclass(frozen=True)
class MomentState:
    """Raw moments <b>, <b^dag b>, <b^2> (not centered)."""

    b_re: float
    b_im: float
    n: float
    b2_re: float
    b2_im: float

    @classmethod
    def from_gaussian(cls, s: GaussianState) -> "MomentState":
        x, p = s.mean.x, s.mean.p
        b = complex(x, p) / math.sqrt(2)
        # centered moments from the covariance, then add back the mean products
        n_c = (s.cov.xx + s.cov.pp - 1.0) / 2
        b2_c = complex((s.cov.xx - s.cov.pp) / 2, s.cov.xp)
        n = n_c + abs(b) ** 2
        b2 = b2_c + b * b
        return cls(b.real, b.imag, n, b2.real, b2.imag)

    def to_gaussian(self) -> GaussianState:
        b = complex(self.b_re, self.b_im)
        n_c = self.n - abs(b) ** 2
        b2_c = complex(self.b2_re, self.b2_im) - b * b
        cov = CovMat2(
            xx=0.5 + b2_c.real + n_c,
            xp=b2_c.imag,
            pp=0.5 - b2_c.real + n_c,
        )
        mean = Displacement2(math.sqrt(2) * b.real, math.sqrt(2) * b.imag)
        return GaussianState(mean, cov)

    def as_array(self) -> np.ndarray:
        return np.array([self.b_re, self.b_im, self.n, self.b2_re, self.b2_im])


def lambda_g_from(m: MirrorSpec) -> float:
    """Gravitational diffusion rate 2 pi G density / (3 omega_m)."""
    return 2 * math.pi * G_NEWTON * m.density / (3 * m.omega_m)


def lambda_T_from(b: BathSpec) -> float:
    """Thermal diffusion rate k_B T gamma / (hbar omega_m)."""
    return K_BOLTZMANN * b.temperature * b.gamma / (HBAR * b.omega_m)


def _check_time(t):
    _finite("t", t)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")


def propagator(t: float, p: PhysicalParams) -> np.ndarray:
    """Damped rotation exp(-gamma t / 2) R(omega_m t) acting on (x, p)."""
    _check_time(t)
    wt = p.omega_m * t
    c, s = math.cos(wt), math.sin(wt)
    return math.exp(-p.gamma * t / 2) * np.array([[c, s], [-s, c]])


def _noise_shape(t: float, p: PhysicalParams) -> tuple[float, float, float]:
    """Return (1 - e^{-gamma t}, a, b) with A(t) = Lambda a, B(t) = Lambda b.

    Written without the 1/Lambda factor so Lambda = 0 stays regular.
    """
    g, w = p.gamma, p.omega_m
    decay = math.exp(-g * t)
    one_minus_decay = -math.expm1(-g * t)
    # 1 - e^{-gt} cos(2wt) without cancellation at small t
    one_minus_ec = one_minus_decay + decay * 2 * math.sin(w * t) ** 2
    sin2 = math.sin(2 * w * t)
    k = 2.0 / (g * g + 4 * w * w)
    a = k * (g * one_minus_ec + 2 * w * decay * sin2)
    b = k * (-2 * w * one_minus_ec + g * decay * sin2)
    return one_minus_decay, a, b


def noise_cov(t: float, p: PhysicalParams) -> CovMat2:
    """Covariance accumulated from the bath and diffusion during [0, t]."""
    _check_time(t)
    one_minus_decay, a, b = _noise_shape(t, p)
    lam = p.lambda_total
    N = one_minus_decay * (p.n_eff + 0.5)
    A, B = lam * a, lam * b
    return CovMat2(xx=N + A, xp=B, pp=N - A)


def evolve(s0: GaussianState, t: float, p: PhysicalParams) -> GaussianState:
    S = propagator(t, p)
    mean = S @ s0.mean.as_array()
    cov = S @ s0.cov.as_array() @ S.T + noise_cov(t, p).as_array()
    return GaussianState(Displacement2.from_array(mean), CovMat2.from_array(cov))


def steady_state_terms(p: PhysicalParams) -> tuple[float, float]:
    """(A_inf, B_inf): squeezing and x-p correlation of the stationary state."""
    g, w, lam = p.gamma, p.omega_m, p.lambda_total
    den = g * g + 4 * w * w
    return 2 * lam * g / den, -4 * lam * w / den


def steady_state(p: PhysicalParams) -> GaussianState:
    A, B = steady_state_terms(p)
    d = p.n_eff + 0.5
    return GaussianState(Displacement2(), CovMat2(xx=d + A, xp=B, pp=d - A))


def default_oracle_dt(p: PhysicalParams) -> float:
    return min(1 / p.omega_m, 1 / p.gamma) / 1000


def _moment_rhs(y: np.ndarray, p: PhysicalParams) -> np.ndarray:
    b = complex(y[0], y[1])
    b2 = complex(y[3], y[4])
    lam = p.lambda_total
    db = -(1j * p.omega_m + p.gamma / 2) * b
    dn = -p.gamma * y[2] + p.gamma * p.n_eff
    db2 = -(2j * p.omega_m + p.gamma) * b2 + 2 * lam
    return np.array([db.real, db.imag, dn, db2.real, db2.imag])


def _rk4_step(y: np.ndarray, h: float, p: PhysicalParams) -> np.ndarray:
    k1 = _moment_rhs(y, p)
    k2 = _moment_rhs(y + 0.5 * h * k1, p)
    k3 = _moment_rhs(y + 0.5 * h * k2, p)
    k4 = _moment_rhs(y + h * k3, p)
    return y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def _rk4_step_map(h: float, p: PhysicalParams) -> np.ndarray:
    """Affine map of one RK4 step, as a 6x6 matrix on (y, 1).

    The moment equations are linear with constant coefficients, so a step is
    affine in y; applying it to the origin and the unit vectors recovers it.
    """
    origin = _rk4_step(np.zeros(5), h, p)
    T = np.zeros((6, 6))
    for j in range(5):
        e = np.zeros(5)
        e[j] = 1.0
        T[:5, j] = _rk4_step(e, h, p) - origin
    T[:5, 5] = origin
    T[5, 5] = 1.0
    return T


def moment_ode_oracle(
    s0: GaussianState, t: float, p: PhysicalParams, dt: float | None = None
) -> GaussianState:
    """Integrate the raw moment equations with fixed-step classical RK4.

    The step count is ceil(t / dt) with the step shrunk to land on ``t``.
    Because each step is an affine map, n steps are applied by binary
    powering of the one-step matrix, which gives the same iterate as looping.
    """
    _check_time(t)
    limit = min(1 / p.omega_m, 1 / p.gamma) / 50
    if dt is None:
        dt = default_oracle_dt(p)
    if not (0 < dt <= limit * (1 + 1e-12)):
        raise ValueError(f"dt={dt} must be in (0, {limit}] for a stable, accurate RK4 step")
    y0 = MomentState.from_gaussian(s0).as_array()
    if t == 0:
        return s0
    n_steps = math.ceil(t / dt)
    T = np.linalg.matrix_power(_rk4_step_map(t / n_steps, p), n_steps)
    y = T[:5, :5] @ y0 + T[:5, 5]
    return MomentState(*map(float, y)).to_gaussian()

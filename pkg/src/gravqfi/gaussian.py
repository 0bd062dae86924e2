"""Single-mode Gaussian states in dimensionless quadratures.

Conventions: hbar = 1, x = (b + b^dag)/sqrt(2), p = (b - b^dag)/(i sqrt(2)),
so the vacuum covariance is I/2 and the symplectic form is [[0, 1], [-1, 0]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

BONA_FIDE_TOL = 1e-10


class NonPhysicalStateError(ValueError):
    """Raised when a covariance matrix violates the uncertainty relation."""


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


def rotation(theta: float) -> np.ndarray:
    """Phase-space rotation [[cos, sin], [-sin, cos]]."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


@dataclass(frozen=True)
class CovMat2:
    """Symmetric 2x2 covariance matrix stored as its three independent entries."""

    xx: float
    xp: float
    pp: float

    @property
    def det(self) -> float:
        return self.xx * self.pp - self.xp * self.xp

    @property
    def trace(self) -> float:
        return self.xx + self.pp

    def as_array(self) -> np.ndarray:
        return np.array([[self.xx, self.xp], [self.xp, self.pp]])

    @classmethod
    def from_array(cls, m: np.ndarray) -> "CovMat2":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(float(m[0, 0]), 0.5 * float(m[0, 1] + m[1, 0]), float(m[1, 1]))

    def inverse(self) -> np.ndarray:
        """Closed-form inverse; refuses non-physical matrices."""
        _require_physical(self)
        d = self.det
        return np.array([[self.pp, -self.xp], [-self.xp, self.xx]]) / d

    def max_abs_diff(self, other: "CovMat2") -> float:
        return max(abs(self.xx - other.xx), abs(self.xp - other.xp), abs(self.pp - other.pp))


@dataclass(frozen=True)
class Displacement2:
    x: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        _check_finite(x=self.x, p=self.p)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p])

    @classmethod
    def from_array(cls, v: np.ndarray) -> "Displacement2":
        return cls(float(v[0]), float(v[1]))


@dataclass(frozen=True)
class GaussianState:
    """Mean vector plus covariance; construction enforces the bona fide test."""

    mean: Displacement2
    cov: CovMat2

    def __post_init__(self):
        _require_physical(self.cov)

    @classmethod
    def vacuum(cls) -> "GaussianState":
        return cls(Displacement2(), CovMat2(0.5, 0.0, 0.5))

    def max_abs_diff(self, other: "GaussianState") -> float:
        return max(
            self.cov.max_abs_diff(other.cov),
            abs(self.mean.x - other.mean.x),
            abs(self.mean.p - other.mean.p),
        )


# Probe families. Each is a frozen record; ProbeSpec is the union of them.


@dataclass(frozen=True)
class Coherent:
    alpha_re: float = 2.0
    alpha_im: float = 0.0

    def __post_init__(self):
        _check_finite(alpha_re=self.alpha_re, alpha_im=self.alpha_im)


@dataclass(frozen=True)
class Thermal:
    n_th0: float = 4.0

    def __post_init__(self):
        _check_finite(n_th0=self.n_th0)
        if self.n_th0 < 0:
            raise ValueError(f"n_th0 must be >= 0, got {self.n_th0}")


@dataclass(frozen=True)
class SqueezedVacuum:
    r: float = 1.4436
    phi: float = 0.0

    def __post_init__(self):
        _check_finite(r=self.r, phi=self.phi)


@dataclass(frozen=True)
class SqueezedThermal:
    n_th0: float = 1.0
    r: float = 0.8814
    phi: float = 0.0

    def __post_init__(self):
        _check_finite(n_th0=self.n_th0, r=self.r, phi=self.phi)
        if self.n_th0 < 0:
            raise ValueError(f"n_th0 must be >= 0, got {self.n_th0}")


ProbeSpec = Union[Coherent, Thermal, SqueezedVacuum, SqueezedThermal]

# Initial states at fixed mean excitation number 4.
TABLE_I_PROBES: dict[str, ProbeSpec] = {
    "coherent": Coherent(2.0, 0.0),
    "thermal": Thermal(4.0),
    "squeezed_vacuum": SqueezedVacuum(1.4436, 0.0),
    "squeezed_thermal": SqueezedThermal(1.0, 0.8814, 0.0),
}


def _squeezed_cov(prefactor: float, r: float, phi: float) -> CovMat2:
    R = rotation(phi)
    core = np.diag([math.exp(-2 * r), math.exp(2 * r)]) * prefactor
    return CovMat2.from_array(R @ core @ R.T)


def make_probe(spec: ProbeSpec) -> GaussianState:
    """Build the initial Gaussian state for a probe description.

    Coherent amplitudes map to means via x = sqrt(2) Re(alpha); squeezing
    with phi = 0 reduces the x variance.
    """
    if isinstance(spec, Coherent):
        mean = Displacement2(math.sqrt(2) * spec.alpha_re, math.sqrt(2) * spec.alpha_im)
        return GaussianState(mean, CovMat2(0.5, 0.0, 0.5))
    if isinstance(spec, Thermal):
        v = spec.n_th0 + 0.5
        return GaussianState(Displacement2(), CovMat2(v, 0.0, v))
    if isinstance(spec, SqueezedVacuum):
        return GaussianState(Displacement2(), _squeezed_cov(0.5, spec.r, spec.phi))
    if isinstance(spec, SqueezedThermal):
        return GaussianState(
            Displacement2(), _squeezed_cov(spec.n_th0 + 0.5, spec.r, spec.phi)
        )
    raise TypeError(f"unknown probe spec {spec!r}")


def energy(s: GaussianState) -> float:
    """Mean excitation number (Tr sigma - 1)/2 + |mean|^2/2."""
    return (s.cov.trace - 1.0) / 2 + (s.mean.x**2 + s.mean.p**2) / 2


def is_bona_fide(c: CovMat2, tol: float = BONA_FIDE_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return c.xx > 0 and c.pp > 0 and c.det >= 0.25 - tol


def _require_physical(c: CovMat2) -> None:
    if not all(math.isfinite(v) for v in (c.xx, c.xp, c.pp)):
        raise NonPhysicalStateError(f"covariance has non-finite entries: {c}")
    if not is_bona_fide(c):
        raise NonPhysicalStateError(
            f"covariance violates the uncertainty relation (det = {c.det:.6g} < 1/4): {c}"
        )


def purity(c: CovMat2) -> float:
    """Tr rho^2 = 1 / (2 sqrt(det sigma)), clipped to 1 within the bona fide tolerance."""
    _require_physical(c)
    return min(1.0, 0.5 / math.sqrt(c.det))


def symplectic_eigenvalue(c: CovMat2) -> float:
    _require_physical(c)
    return math.sqrt(c.det)

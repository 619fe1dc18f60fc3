"""Model parameters, recurrence check and wedge geometry.

The process lives in the three-quarter plane ``S = {z1 >= 0 or z2 >= 0}``,
driven by a planar Brownian motion with drift ``(mu1, mu2)`` and covariance
``[[sigma1, rho], [rho, sigma2]]``, reflected along ``R1 = (r1, 1)`` on the
negative abscissa and ``R2 = (1, r2)`` on the negative ordinate.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .exceptions import NonElliptic, NotSymmetric


@dataclass(frozen=True)
class ModelParams:
    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    rho: float
    r1: float
    r2: float

    @property
    def theta(self) -> float:
        return 0.5 * (self.sigma1 + self.sigma2 - 2.0 * self.rho)

    @property
    def mu(self) -> np.ndarray:
        return np.array([self.mu1, self.mu2])

    @property
    def cov(self) -> np.ndarray:
        return np.array([[self.sigma1, self.rho], [self.rho, self.sigma2]])

    @property
    def det(self) -> float:
        return self.sigma1 * self.sigma2 - self.rho ** 2

    def swapped(self) -> "ModelParams":
        """Relabel the axes: (sigma1, mu1, r1) <-> (sigma2, mu2, r2)."""
        return ModelParams(self.mu2, self.mu1, self.sigma2, self.sigma1,
                           self.rho, self.r2, self.r1)

    def to_dict(self) -> dict:
        return {"mu": [self.mu1, self.mu2], "sigma": [self.sigma1, self.sigma2],
                "rho": self.rho, "refl": [self.r1, self.r2]}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        try:
            mu, sigma, refl = d["mu"], d["sigma"], d["refl"]
            return cls(float(mu[0]), float(mu[1]), float(sigma[0]),
                       float(sigma[1]), float(d["rho"]), float(refl[0]),
                       float(refl[1]))
        except (KeyError, IndexError, TypeError) as exc:
            raise ValueError(f"malformed parameter mapping: {exc}") from None

    @classmethod
    def from_json(cls, path) -> "ModelParams":
        return cls.from_dict(json.loads(Path(path).read_text()))

    @classmethod
    def symmetric(cls, mu: float, sigma: float, rho: float, r: float) -> "ModelParams":
        return cls(mu, mu, sigma, sigma, rho, r, r)

    def digest(self) -> str:
        """Hash that does not depend on key order of the JSON form."""
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# Reference configurations used throughout the tests and the CLI defaults.
DEFAULT_ASYMMETRIC = ModelParams(mu1=-1.0, mu2=-2.0, sigma1=1.0, sigma2=2.0,
                                 rho=0.3, r1=2.0, r2=3.0)
DEFAULT_SYMMETRIC = ModelParams.symmetric(mu=-1.0, sigma=1.0, rho=0.0, r=2.0)


@dataclass(frozen=True)
class RecurrenceReport:
    drift_negative: tuple[bool, bool]
    reflection_conditions: tuple[bool, bool]

    @property
    def recurrent(self) -> bool:
        return all(self.drift_negative) and all(self.reflection_conditions)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["recurrent"] = self.recurrent
        return d


def check_elliptic(params: ModelParams) -> None:
    if not params.det > 0 or params.sigma1 <= 0 or params.sigma2 <= 0:
        raise NonElliptic(
            f"covariance is not elliptic: sigma1*sigma2 - rho^2 = {params.det:g}")


def validate(params: ModelParams) -> RecurrenceReport:
    """Positive recurrence: negative drift and the two reflection inequalities."""
    check_elliptic(params)
    p = params
    return RecurrenceReport(
        drift_negative=(bool(p.mu1 < 0), bool(p.mu2 < 0)),
        reflection_conditions=(bool(p.mu1 - p.r1 * p.mu2 > 0),
                               bool(p.mu2 - p.r2 * p.mu1 > 0)),
    )


def is_symmetric(params: ModelParams) -> bool:
    return (params.mu1 == params.mu2 and params.sigma1 == params.sigma2
            and params.r1 == params.r2)


@dataclass(frozen=True)
class WedgeAngles:
    beta: float
    delta: float
    beta_tilde: float
    epsilon: float


def wedge_angles(params: ModelParams) -> WedgeAngles:
    """Angles of the identity-covariance picture of a symmetric model.

    ``beta`` is the opening of the transformed cone, ``delta`` the common
    reflection angle, and ``beta_tilde``/``epsilon`` describe the folded
    quadrant process.
    """
    if not is_symmetric(params):
        raise NotSymmetric("wedge angles are defined for symmetric parameters")
    check_elliptic(params)
    sigma, rho, r = params.sigma1, params.rho, params.r1
    beta = 2.0 * math.pi - math.acos(-rho / sigma)
    denom = r + math.cos(beta)
    if denom == 0.0:
        delta = 0.5 * math.pi
    else:
        delta = math.atan(math.sin(beta) / denom)
        if delta <= 0.0:
            delta += math.pi
    return WedgeAngles(beta=beta, delta=delta, beta_tilde=0.5 * beta,
                       epsilon=0.5 * math.pi)


def rho_from_beta(beta: float, sigma: float) -> float:
    return -sigma * math.cos(beta)

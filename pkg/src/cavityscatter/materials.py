"""Material and configuration types shared by both solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Material:
    """Isotropic material given by density and body-wave velocities.

    Lame parameters derive as lambda = rho (vp^2 - 2 vs^2) for elastic media,
    lambda = rho vp^2 when vs = 0 (acoustic), and mu = rho vs^2.
    """

    rho: float
    vp: float
    vs: float

    def __post_init__(self):
        if self.rho <= 0 or self.vp <= 0 or self.vs < 0:
            raise ValueError("need rho > 0, vp > 0, vs >= 0")
        if self.lam <= 0:
            raise ValueError("lambda = rho (vp^2 - 2 vs^2) must be positive")

    @property
    def is_acoustic(self):
        return self.vs == 0.0

    @property
    def mu(self):
        return self.rho * self.vs ** 2

    @property
    def lam(self):
        if self.vs == 0.0:
            return self.rho * self.vp ** 2
        return self.rho * (self.vp ** 2 - 2 * self.vs ** 2)

    @property
    def impedance_p(self):
        """Plane P-wave impedance rho * vp."""
        return self.rho * self.vp


#: Reference test-case materials (acoustic cavity in hard rock).
DEFAULT_ACOUSTIC = Material(rho=1000.0, vp=1500.0, vs=0.0)
DEFAULT_ELASTIC = Material(rho=2700.0, vp=4000.0, vs=2310.0)


@dataclass(frozen=True)
class SphereConfig:
    """Spherical inclusion of radius R centred at the origin.

    The interior must be acoustic (vs = 0); tests may relax this with
    `allow_elastic_interior` to exercise the general interface system.
    """

    radius: float
    interior: Material
    exterior: Material
    allow_elastic_interior: bool = False

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.exterior.vs <= 0:
            raise ValueError("exterior medium must be elastic (vs > 0)")
        if not self.allow_elastic_interior and self.interior.vs != 0.0:
            raise ValueError("interior material must be acoustic (vs = 0)")


def default_sphere(radius=30.0):
    return SphereConfig(radius=radius, interior=DEFAULT_ACOUSTIC,
                        exterior=DEFAULT_ELASTIC)


@dataclass(frozen=True)
class FrequencyContext:
    """Angular frequency and the derived subdomain wavenumbers."""

    omega: float
    kp_e: float
    ks_e: float
    kp_a: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @classmethod
    def for_sphere(cls, omega, cfg: SphereConfig):
        return cls(omega=omega,
                   kp_e=omega / cfg.exterior.vp,
                   ks_e=omega / cfg.exterior.vs,
                   kp_a=omega / cfg.interior.vp)


def plane_impedance_contrast(inner: Material, outer: Material):
    """|Z_a - Z_e| / (Z_a + Z_e) with Z = rho * vp (plane-interface reflection)."""
    za, ze = inner.impedance_p, outer.impedance_p
    return abs(za - ze) / (za + ze)

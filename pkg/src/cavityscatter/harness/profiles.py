"""Receiver profiles of the validation study.

A: vertical line x = y = 0, z in [-100, 100] step 2 (crosses the cavity);
B: horizontal line y = z = 0, x in [-100, 100] step 2;
C/D: horizontal lines at z = +300 / -300, x in [-300, 300] step 10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Profile:
    name: str
    receivers: np.ndarray     # (n, 3)

    def __len__(self):
        return len(self.receivers)


def build_profile(name, radius=30.0, custom_points=None) -> Profile:
    if name == "A":
        z = np.arange(-100.0, 100.0 + 1e-9, 2.0)
        pts = np.stack([np.zeros_like(z), np.zeros_like(z), z], axis=1)
    elif name == "B":
        x = np.arange(-100.0, 100.0 + 1e-9, 2.0)
        pts = np.stack([x, np.zeros_like(x), np.zeros_like(x)], axis=1)
    elif name in ("C", "D"):
        x = np.arange(-300.0, 300.0 + 1e-9, 10.0)
        z = 300.0 if name == "C" else -300.0
        pts = np.stack([x, np.zeros_like(x), np.full_like(x, z)], axis=1)
    elif name == "custom":
        if custom_points is None:
            raise ValueError("custom profile needs points")
        pts = np.atleast_2d(np.asarray(custom_points, dtype=float))
    else:
        raise ValueError(f"unknown profile {name!r}")
    return Profile(name=name, receivers=pts)


def build_profiles(names, radius=30.0):
    return [build_profile(n, radius) for n in names]


def interior_flags(profile: Profile, radius):
    """True strictly inside the sphere; points on r = R count as exterior."""
    r = np.linalg.norm(profile.receivers, axis=1)
    return r < radius - 1e-9 * radius


def receiver_sides(profile: Profile, radius):
    """Evaluation side per receiver ('interior'/'exterior'); interface points
    are evaluated from the exterior."""
    return ["interior" if flag else "exterior"
            for flag in interior_flags(profile, radius)]

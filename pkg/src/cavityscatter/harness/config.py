"""Flat dotted-key run configuration.

Format: one `key = value` per line, `#` comments, e.g.
    config.version = 1
    material.elastic.vp = 4000
Values parse as int, float, bool or string; triplets like `domain.dims`
accept comma-separated floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from ..materials import Material, SphereConfig
from ..synth import RickerParams

CONFIG_VERSION = 1


def _parse_scalar(text):
    s = text.strip()
    if s.lower() in ("true", "false"):
        return s.lower() == "true"
    if "," in s:
        parts = [v.strip() for v in s.split(",")]
        try:
            return tuple(float(v) for v in parts)
        except ValueError:
            return tuple(parts)
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            continue
    return s


def parse_config_text(text):
    out = {}
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {ln}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        out[key] = _parse_scalar(val)
    return out


@dataclass
class RunConfig:
    """Validated run parameters (defaults: 20 Hz desk tier)."""

    # materials (reference test case)
    rho_acoustic: float = 1000.0
    vp_acoustic: float = 1500.0
    vs_acoustic: float = 0.0
    rho_elastic: float = 2700.0
    vp_elastic: float = 4000.0
    vs_elastic: float = 2310.0
    # geometry
    radius: float = 30.0
    inner_box_half: float = 60.0
    domain_dims: tuple = (840.0, 840.0, 840.0)
    h_inner: float = 30.0
    h_outer: float = 60.0
    n_radial_layers: int = 1
    core_frac: float = 0.7
    # source
    f_peak: float = 20.0
    t0: float = 0.085
    amplitude: float = 1.0
    z0: float = -430.0
    # discretization
    degree_elastic: int = 4
    degree_acoustic: int = 3
    penalty_alpha: float = 10.0
    cfl_safety: float = 0.2
    cfl_const: float = 0.175
    # time window / synthesis
    t_end: float = 0.5
    synth_n_steps: int = 2048
    synth_dt: float = 1.0 / 2048.0
    f_max_factor: float = 3.0
    # outputs
    profiles: tuple = ("A", "B", "C", "D")
    snapshot_times: tuple = tuple(np.arange(0.10, 0.451, 0.05).round(4))
    snapshot_extent: float = 300.0
    snapshot_spacing: float = 10.0
    compare_window: tuple = (0.0, 0.5)

    def __post_init__(self):
        if isinstance(self.profiles, str):
            self.profiles = (self.profiles,)
        self.profiles = tuple(str(p) for p in self.profiles)
        for name in ("domain_dims", "snapshot_times", "compare_window"):
            val = getattr(self, name)
            if not isinstance(val, tuple):
                val = (float(val),)
            setattr(self, name, tuple(float(v) for v in val))
        self.validate()

    def validate(self):
        if self.vs_acoustic != 0.0:
            raise ValueError("acoustic block must have vs = 0")
        mats = self.materials()
        el = mats["ElasticOuter"]
        if el.vp / el.vs > 2.0 + 1e-12:
            # hard failure at load: the paraxial boundary model requires it
            raise ValueError("paraxial absorbing boundaries need vp/vs <= 2")
        if not (self.radius < self.inner_box_half < min(self.domain_dims) / 2):
            raise ValueError("need R < inner_box_half < domain/2")
        if self.synth_n_steps & (self.synth_n_steps - 1):
            raise ValueError("synth_n_steps must be a power of two")
        nyq = 0.5 / self.synth_dt
        if self.f_max_factor * self.f_peak >= nyq:
            raise ValueError("synthesis band exceeds the Nyquist frequency")
        if self.t_end <= 0 or self.f_peak <= 0:
            raise ValueError("t_end and f_peak must be positive")

    def materials(self):
        ac = Material(self.rho_acoustic, self.vp_acoustic, self.vs_acoustic)
        el = Material(self.rho_elastic, self.vp_elastic, self.vs_elastic)
        return {"Acoustic": ac, "ElasticInner": el, "ElasticOuter": el}

    def sphere(self) -> SphereConfig:
        m = self.materials()
        return SphereConfig(radius=self.radius, interior=m["Acoustic"],
                            exterior=m["ElasticOuter"])

    def ricker(self) -> RickerParams:
        return RickerParams(f_peak=self.f_peak, t0=self.t0,
                            amplitude=self.amplitude)

    def degrees(self):
        return {"Acoustic": self.degree_acoustic,
                "ElasticInner": self.degree_elastic,
                "ElasticOuter": self.degree_elastic}


_KEYMAP = {
    "material.acoustic.rho": "rho_acoustic",
    "material.acoustic.vp": "vp_acoustic",
    "material.acoustic.vs": "vs_acoustic",
    "material.elastic.rho": "rho_elastic",
    "material.elastic.vp": "vp_elastic",
    "material.elastic.vs": "vs_elastic",
    "geometry.radius": "radius",
    "geometry.inner_box_half": "inner_box_half",
    "geometry.domain_dims": "domain_dims",
    "mesh.h_inner": "h_inner",
    "mesh.h_outer": "h_outer",
    "mesh.n_radial_layers": "n_radial_layers",
    "mesh.core_frac": "core_frac",
    "source.f_peak": "f_peak",
    "source.t0": "t0",
    "source.amplitude": "amplitude",
    "source.z0": "z0",
    "dg.degree_elastic": "degree_elastic",
    "dg.degree_acoustic": "degree_acoustic",
    "dg.penalty_alpha": "penalty_alpha",
    "dg.cfl_safety": "cfl_safety",
    "dg.cfl_const": "cfl_const",
    "time.t_end": "t_end",
    "synth.n_steps": "synth_n_steps",
    "synth.dt": "synth_dt",
    "synth.f_max_factor": "f_max_factor",
    "output.profiles": "profiles",
    "output.snapshot_times": "snapshot_times",
    "output.snapshot_extent": "snapshot_extent",
    "output.snapshot_spacing": "snapshot_spacing",
    "output.compare_window": "compare_window",
}
_INVMAP = {v: k for k, v in _KEYMAP.items()}


class ConfigError(ValueError):
    pass


def config_from_dict(raw):
    version = raw.pop("config.version", CONFIG_VERSION)
    if int(version) != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version}")
    kwargs = {}
    for key, val in raw.items():
        attr = _KEYMAP.get(key)
        if attr is None:
            raise ConfigError(f"unknown config key: {key}")
        kwargs[attr] = val
    try:
        cfg = RunConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path):
    with open(path) as f:
        return config_from_dict(parse_config_text(f.read()))


def serialize_config(cfg: RunConfig):
    lines = [f"config.version = {CONFIG_VERSION}"]
    for f in fields(cfg):
        key = _INVMAP[f.name]
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            if all(isinstance(v, str) for v in val):
                sval = ",".join(val) if len(val) > 1 else val[0]
            else:
                sval = ",".join(f"{float(v):.12g}" for v in val)
        elif isinstance(val, float):
            sval = f"{val:.12g}"
        else:
            sval = str(val)
        lines.append(f"{key} = {sval}")
    return "\n".join(sorted(lines)) + "\n"

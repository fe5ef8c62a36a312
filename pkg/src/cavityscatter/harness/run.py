"""Pipelines behind the CLI subcommands."""

from __future__ import annotations

import os
import time

import numpy as np

from .. import analytic, mesh as meshmod, synth
from ..dg import (assemble_system, build_dofmap, cfl_dt, leapfrog_run)
from ..dg.assembly import PenaltyParams
from ..dg.cfl import min_gll_spacing
from ..dg.kernels import backend_name
from ..dg.leapfrog import locate_point
from ..dg.sources import ScatteredFieldSource
from ..synth import RickerParams, TimeGrid
from . import io as hio
from .config import RunConfig, serialize_config
from .profiles import build_profile, interior_flags, receiver_sides


def _config_section(cfg: RunConfig):
    entries = {}
    for line in serialize_config(cfg).splitlines():
        key, val = line.split(" = ", 1)
        entries[key] = val
    return entries


def cmd_ricker(cfg: RunConfig, outdir):
    os.makedirs(outdir, exist_ok=True)
    prof = cfg.ricker()
    t = np.arange(0.0, cfg.t_end, cfg.synth_dt)
    wav = synth.ricker(prof, t)
    hio.write_seismogram_csv(os.path.join(outdir, "ricker_wavelet.csv"),
                             t, wav[None, :], ["ricker"])
    f = np.linspace(0.0, cfg.f_max_factor * cfg.f_peak * 1.5, 512)
    spec = np.abs(synth.ricker_spectrum(prof, f))
    hio.write_seismogram_csv(os.path.join(outdir, "ricker_spectrum.csv"),
                             f, spec[None, :], ["amplitude"])
    return {"wavelet": "ricker_wavelet.csv", "spectrum": "ricker_spectrum.csv"}


def build_run_mesh(cfg: RunConfig):
    return meshmod.build_sphere_in_box(
        cfg.radius, cfg.inner_box_half, cfg.domain_dims, cfg.h_inner,
        cfg.h_outer, n_radial_layers=cfg.n_radial_layers,
        core_frac=cfg.core_frac)


def cmd_mesh(cfg: RunConfig, outdir, vtk=False):
    os.makedirs(outdir, exist_ok=True)
    m = build_run_mesh(cfg)
    path = os.path.join(outdir, "mesh.txt")
    with open(path, "w") as f:
        f.write(meshmod.write_mesh_text(m))
    if vtk:
        meshmod.write_vtk(m, os.path.join(outdir, "mesh.vtk"))
    return {"mesh": path, "n_elements": m.n_elems,
            "face_sets": meshmod.face_set_summary(m), "hash": m.content_hash()}


def cmd_analytic(cfg: RunConfig, outdir, threads=1, verbose=False):
    """Frequency-sweep synthesis of total-field seismograms on the profiles."""
    os.makedirs(outdir, exist_ok=True)
    sphere = cfg.sphere()
    prof = cfg.ricker()
    grid = TimeGrid(dt=cfg.synth_dt, n_steps=cfg.synth_n_steps)
    outputs = {}
    diagnostics = {}
    for name in cfg.profiles:
        profile = build_profile(name, cfg.radius)
        sides = receiver_sides(profile, cfg.radius)
        flags = interior_flags(profile, cfg.radius)
        ids = [f"rx{i:03d}" for i in range(len(profile))]
        hio.write_receiver_csv(os.path.join(outdir, f"analytic_{name}_receivers.csv"),
                               profile.receivers, flags)
        for comp in ("z", "x"):
            t0 = time.time()
            seis, diag = synth.synthesize_seismograms(
                sphere, profile.receivers, comp, prof, grid, cfg.z0,
                f_max=cfg.f_max_factor * cfg.f_peak, mode="phase",
                sides=sides, what="total", threads=threads)
            traces = np.stack([s.values for s in seis])
            fn = f"analytic_{name}_{comp}.csv"
            hio.write_seismogram_csv(os.path.join(outdir, fn), grid.times, traces, ids)
            outputs[f"{name}_{comp}"] = fn
            diagnostics[f"{name}_{comp}"] = {
                "n_freq": diag["n_freq"], "imag_residue": diag["imag_residue"],
                "max_system_residual": diag["max_system_residual"],
                "wall_s": round(time.time() - t0, 2)}
            if verbose:
                print(f"analytic profile {name}/{comp}: {diagnostics[f'{name}_{comp}']}")
    sections = {
        "manifest": {"kind": "analytic", "created": time.strftime("%Y-%m-%dT%H:%M:%S")},
        "synth": {"df": 1.0 / (cfg.synth_dt * cfg.synth_n_steps),
                  "f_max": cfg.f_max_factor * cfg.f_peak, "mode": "phase"},
        "config": _config_section(cfg),
    }
    hio.write_manifest(os.path.join(outdir, "analytic_manifest.txt"), sections)
    return outputs, diagnostics


def _snapshot_sampler(dof, cfg):
    ext, sp = cfg.snapshot_extent, cfg.snapshot_spacing
    xs = np.arange(-ext, ext + 1e-9, sp)
    zs = np.arange(-ext, ext + 1e-9, sp)
    recs = []
    for x in xs:
        for z in zs:
            recs.append(locate_point(dof, np.array([x, 0.0, z])))

    def sampler(u):
        vals = np.array([rec.weights @ u[rec.gidx] for rec in recs])
        return vals.reshape(len(xs), len(zs), 3)

    return sampler, xs, zs


def cmd_dg(cfg: RunConfig, outdir, verbose=False, snapshots=True,
           progress_every=0):
    """Full DG pipeline: mesh -> assembly -> leap-frog -> seismograms,
    snapshots and a manifest.  The run solves the scattered field; the
    written seismograms are totals (incident added in closed form)."""
    os.makedirs(outdir, exist_ok=True)
    mats = cfg.materials()
    m = build_run_mesh(cfg)
    dof = build_dofmap(m, cfg.degrees())
    sysm = assemble_system(dof, mats,
                           PenaltyParams(alpha=cfg.penalty_alpha), abc=True)
    dt = cfl_dt(dof, mats, cfg.cfl_safety, cfg.cfl_const)
    n_steps = int(np.ceil(cfg.t_end / dt)) + 1
    prof = cfg.ricker()
    src = ScatteredFieldSource(dof, mats["Acoustic"], mats["ElasticOuter"],
                               prof, cfg.z0)

    profiles = [build_profile(nm, cfg.radius) for nm in cfg.profiles]
    receivers, rec_slices = [], []
    for p in profiles:
        flags = interior_flags(p, cfg.radius)
        start = len(receivers)
        for pt, flag in zip(p.receivers, flags):
            receivers.append(locate_point(dof, pt,
                                          prefer_block="Acoustic" if flag else None))
        rec_slices.append(slice(start, len(receivers)))

    sampler = None
    xs = zs = None
    if snapshots and cfg.snapshot_times:
        sampler, xs, zs = _snapshot_sampler(dof, cfg)

    if verbose:
        print(f"dg: {m.n_elems} elements, {dof.n_nodes} nodes, dt={dt:.3e}, "
              f"{n_steps} steps, backend={backend_name()}", flush=True)
    t_wall = time.time()
    res = leapfrog_run(sysm, dt, n_steps, sources=[src], receivers=receivers,
                       snapshot_times=cfg.snapshot_times if sampler else (),
                       snapshot_sampler=sampler, energy_every=25,
                       progress=progress_every or None)
    wall = time.time() - t_wall

    outputs = {}
    comp_index = {"x": 0, "y": 1, "z": 2}
    for p, sl in zip(profiles, rec_slices):
        flags = interior_flags(p, cfg.radius)
        ids = [f"rx{i:03d}" for i in range(len(p))]
        hio.write_receiver_csv(os.path.join(outdir, f"dg_{p.name}_receivers.csv"),
                               p.receivers, flags)
        for comp in ("z", "x"):
            traces = res.seismograms[sl, comp_index[comp], :].copy()
            if comp == "z":   # incident carried only by the z component
                for i, pt in enumerate(p.receivers):
                    traces[i] += synth.incident_time_domain(
                        mats["ElasticOuter"], cfg.z0, prof, pt, res.times)
            fn = f"dg_{p.name}_{comp}.csv"
            hio.write_seismogram_csv(os.path.join(outdir, fn), res.times, traces, ids)
            outputs[f"{p.name}_{comp}"] = fn

    for ts, vals in res.snapshots.items():
        fn = os.path.join(outdir, f"dg_snapshot_t{ts:.3f}.vtk")
        hio.write_snapshot_vtk(fn, (xs[0], zs[0]), cfg.snapshot_spacing,
                               (len(xs), len(zs)), vals)

    dt_bound = cfl_dt(dof, mats, cfg.cfl_safety, cfg.cfl_const)
    sections = {
        "manifest": {"kind": "dg", "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
                     "backend": backend_name(), "wall_seconds": round(wall, 1)},
        "mesh": {"hash": m.content_hash(), "n_elements": m.n_elems,
                 "n_nodes": dof.n_nodes,
                 **{f"faces_{k}": v for k, v in meshmod.face_set_summary(m).items()}},
        "dg": {"dt": dt, "n_steps": n_steps, "dt_bound": dt_bound,
               "cfl_margin": dt / dt_bound,
               "h_min_gll": min_gll_spacing(dof),
               "eta_min": sysm.eta_range[0], "eta_max": sysm.eta_range[1],
               **{f"degree_{k}": v for k, v in cfg.degrees().items()},
               "abc_warnings": "; ".join(sysm.abc_warnings) or "none"},
        "materials": {f"{k}_{p}": getattr(v, p) for k, v in mats.items()
                      for p in ("rho", "vp", "vs")},
        "source": {"z0": cfg.z0, "t0": cfg.t0, "f_peak": cfg.f_peak},
        "config": _config_section(cfg),
    }
    hio.write_manifest(os.path.join(outdir, "dg_manifest.txt"), sections)
    return outputs, {"dt": dt, "n_steps": n_steps, "wall": wall,
                     "energy": res.energy, "times": res.times}

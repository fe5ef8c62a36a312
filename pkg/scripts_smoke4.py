import numpy as np, time
from cavityscatter import mesh as msh, synth
from cavityscatter.dg import build_dofmap, assemble_system, cfl_dt, leapfrog_run
from cavityscatter.dg.assembly import PenaltyParams
from cavityscatter.dg.sources import ScatteredFieldSource
from cavityscatter.dg.leapfrog import locate_point
from cavityscatter.materials import DEFAULT_ELASTIC, DEFAULT_ACOUSTIC, default_sphere
from cavityscatter.synth import RickerParams, TimeGrid, incident_time_domain

mats = {"Acoustic": DEFAULT_ACOUSTIC, "ElasticInner": DEFAULT_ELASTIC, "ElasticOuter": DEFAULT_ELASTIC}
m = msh.build_sphere_in_box(30., 60., (600.,)*3, h_inner=30., h_outer=60., n_radial_layers=1, core_frac=0.7)
dof = build_dofmap(m, {"Acoustic":3, "ElasticInner":4, "ElasticOuter":4})
sysm = assemble_system(dof, mats, PenaltyParams(), abc=True)
dt = cfl_dt(dof, mats)
prof = RickerParams(f_peak=20., t0=0.085)
z0 = -430.
src = ScatteredFieldSource(dof, DEFAULT_ACOUSTIC, DEFAULT_ELASTIC, prof, z0)
pts = np.array([[0.,0.,-60.],[0.,0.,-90.],[0.,0.,0.],[0.,0.,15.],[0.,0.,60.],[60.,0.,0.]])
prefer = [None, None, "Acoustic", "Acoustic", None, None]
recs = [locate_point(dof, p, pb) for p, pb in zip(pts, prefer)]
T = 0.25
n_steps = int(T/dt)+1
print("elements %d dt=%.3e steps=%d" % (m.n_elems, dt, n_steps), flush=True)
t0 = time.time()
res = leapfrog_run(sysm, dt, n_steps, sources=[src], receivers=recs, energy_every=500,
                   progress=4000)
wall = time.time()-t0
print("run %.1f s (%.1f ms/step)" % (wall, wall/n_steps*1e3), flush=True)
np.savez('/tmp/smoke4.npz', seis=res.seismograms, t=res.times, pts=pts)

cfgS = default_sphere()
grid = TimeGrid(dt=1/2048., n_steps=1024)
sides = ["exterior","exterior","interior","interior","exterior","exterior"]
seisZ, diag = synth.synthesize_seismograms(cfgS, pts, "z", prof, grid, z0, sides=sides, what="total")
for i, p in enumerate(pts):
    dg_tot = res.seismograms[i,2].copy() + incident_time_domain(DEFAULT_ELASTIC, z0, prof, p, res.times)
    an = np.interp(res.times, grid.times, seisZ[i].values)
    num = np.linalg.norm(dg_tot - an)/np.linalg.norm(an)
    print(f"rx {p}: rel L2 {num:.3f}, peaks dg/an {np.abs(dg_tot).max()/np.abs(an).max():.3f}", flush=True)
print("DONE")

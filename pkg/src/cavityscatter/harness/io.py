"""CSV and manifest writers (9-significant-digit floats, deterministic)."""

from __future__ import annotations

import numpy as np


def write_seismogram_csv(path, times, traces, ids):
    """Header `t,<rx_id>...`, one row per time step."""
    traces = np.atleast_2d(traces)
    with open(path, "w") as f:
        f.write("t," + ",".join(ids) + "\n")
        for k, t in enumerate(times):
            row = ",".join("%.9g" % traces[i, k] for i in range(len(ids)))
            f.write("%.9g,%s\n" % (t, row))


def read_seismogram_csv(path):
    with open(path) as f:
        header = f.readline().strip().split(",")
        ids = header[1:]
        data = np.loadtxt(f, delimiter=",")
    data = np.atleast_2d(data)
    return data[:, 0], data[:, 1:].T, ids


def write_receiver_csv(path, receivers, interior):
    with open(path, "w") as f:
        f.write("receiver,x,y,z,interior\n")
        for i, (p, flag) in enumerate(zip(receivers, interior)):
            f.write(f"rx{i:03d},%.9g,%.9g,%.9g,{int(flag)}\n" % tuple(p))


def write_manifest(path, sections):
    """sections: ordered dict name -> dict of key/value pairs."""
    with open(path, "w") as f:
        for name, entries in sections.items():
            for key, val in entries.items():
                f.write(f"{name}.{key} = {val}\n")


def write_snapshot_vtk(path, origin, spacing, shape, vectors, name="displacement"):
    """Legacy-VTK-ASCII structured-points slice with one 3-vector field.
    shape = (nx, nz) on the XZ plane; vectors shaped (nx, nz, 3)."""
    nx, nz = shape
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\ncavityscatter snapshot\nASCII\n")
        f.write("DATASET STRUCTURED_POINTS\n")
        f.write(f"DIMENSIONS {nx} 1 {nz}\n")
        f.write(f"ORIGIN {origin[0]:.9g} 0 {origin[1]:.9g}\n")
        f.write(f"SPACING {spacing:.9g} 1 {spacing:.9g}\n")
        f.write(f"POINT_DATA {nx * nz}\n")
        f.write(f"VECTORS {name} double\n")
        for k in range(nz):
            for i in range(nx):
                f.write("%.9g %.9g %.9g\n" % tuple(vectors[i, k]))

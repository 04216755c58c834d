"""Triangle meshes over plane parameter domains.

Vertices are stored as complex numbers; triangles as index triples with
positive (counterclockwise) parameter-plane orientation.  Images, when
present, are per-vertex points in R^3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ioutil import atomic_write_text

MIN_TRIANGLE_AREA = 1e-14


@dataclass
class ParamMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    images: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=complex).ravel()
        self.triangles = np.asarray(self.triangles, dtype=int).reshape(-1, 3)
        if self.images is not None:
            self.images = np.asarray(self.images, dtype=float).reshape(-1, 3)

    def param_areas(self):
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1.real * d2.imag - d1.imag * d2.real)

    def validate(self):
        if self.triangles.size and (self.triangles.min() < 0
                                    or self.triangles.max() >= len(self.vertices)):
            raise ValidationError("mesh-degenerate", "triangle index out of range")
        if self.images is not None and len(self.images) != len(self.vertices):
            raise ValidationError("mesh-degenerate", "images do not match vertices")
        areas = self.param_areas()
        if np.any(areas < MIN_TRIANGLE_AREA):
            raise ValidationError(
                "mesh-degenerate",
                f"triangle with parameter area < {MIN_TRIANGLE_AREA} (min {areas.min():g})")
        return self


def _stitch_rings(inner_ids, outer_ids, tris):
    """Merge two concentric node rings into a CCW triangle strip."""
    n_in, n_out = len(inner_ids), len(outer_ids)
    i = j = 0
    while i < n_in or j < n_out:
        take_outer = j < n_out and (i == n_in or (j + 1) / n_out <= (i + 1) / n_in)
        if take_outer:
            tris.append((inner_ids[i % n_in], outer_ids[j % n_out],
                         outer_ids[(j + 1) % n_out]))
            j += 1
        else:
            tris.append((inner_ids[i % n_in], outer_ids[j % n_out],
                         inner_ids[(i + 1) % n_in]))
            i += 1


def disk_mesh(n_triangles, radius=1.0, center=0j):
    """Polar fan triangulation of a disk with about n_triangles triangles.

    Ring k out of R carries 6k nodes, giving 6 R^2 triangles total.
    """
    rings = max(1, round(np.sqrt(n_triangles / 6.0)))
    verts = [complex(center)]
    ring_ids = []
    for k in range(1, rings + 1):
        start = len(verts)
        angles = 2 * np.pi * np.arange(6 * k) / (6 * k)
        verts.extend(center + radius * (k / rings) * np.exp(1j * angles))
        ring_ids.append(list(range(start, len(verts))))
    tris = []
    for j in range(6):
        tris.append((0, ring_ids[0][j], ring_ids[0][(j + 1) % 6]))
    for k in range(1, rings):
        _stitch_rings(ring_ids[k - 1], ring_ids[k], tris)
    return ParamMesh(np.array(verts), np.array(tris)).validate()


def annulus_mesh(r_inner, r_outer, n_radial=24, n_angular=96, center=0j):
    """Structured triangulation of the annulus r_inner < |z| < r_outer."""
    if not (0 < r_inner < r_outer):
        raise ValidationError("mesh-degenerate", "need 0 < r_inner < r_outer")
    radii = np.linspace(r_inner, r_outer, n_radial + 1)
    angles = 2 * np.pi * np.arange(n_angular) / n_angular
    verts = (center + radii[:, None] * np.exp(1j * angles[None, :])).ravel()

    def vid(i, j):
        return i * n_angular + j % n_angular

    tris = []
    for i in range(n_radial):
        for j in range(n_angular):
            tris.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            tris.append((vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return ParamMesh(verts, np.array(tris)).validate()


def grid_mesh(x0, x1, y0, y1, nx, ny):
    """Structured triangulation of a rectangle."""
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    verts = (xs[None, :] + 1j * ys[:, None]).ravel()

    def vid(i, j):
        return i * (nx + 1) + j

    tris = []
    for i in range(ny):
        for j in range(nx):
            tris.append((vid(i, j), vid(i, j + 1), vid(i + 1, j + 1)))
            tris.append((vid(i, j), vid(i + 1, j + 1), vid(i + 1, j)))
    return ParamMesh(verts, np.array(tris)).validate()


def write_mesh_csv(mesh, vertices_path, triangles_path):
    """CSV export: per-vertex 'x,y,f1,f2,f3' plus an 'i0,i1,i2' triangle list."""
    img = mesh.images
    lines = ["x,y,f1,f2,f3"]
    for idx, v in enumerate(mesh.vertices):
        f = img[idx] if img is not None else (0.0, 0.0, 0.0)
        lines.append(f"{v.real:.12g},{v.imag:.12g},{f[0]:.12g},{f[1]:.12g},{f[2]:.12g}")
    atomic_write_text(vertices_path, "\n".join(lines) + "\n")
    lines = ["i0,i1,i2"]
    for t in mesh.triangles:
        lines.append(f"{t[0]},{t[1]},{t[2]}")
    atomic_write_text(triangles_path, "\n".join(lines) + "\n")

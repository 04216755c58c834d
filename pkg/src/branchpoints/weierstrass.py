"""Polynomial minimal surfaces in Euclidean 3-space from a (h, g) pair.

The pair stores h (a complex polynomial) and g (the Gauss map in
stereographic projection).  The derivative triple is

    f_z = ( h(1-g^2)/2,  -i h(1+g^2)/2,  h g )

and the surface is f = 2 Re F with F the exact polynomial antiderivative
normalized by F(0) = 0, so f(0) is the origin.  Conformality
(sum of the squared components of f_z vanishing identically) is an
algebraic identity of the representation; branch points sit exactly at
the zeros of h.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as npoly

from .errors import NumericalError, ValidationError
from .meshes import ParamMesh

MAX_DEGREE = 32
ROOT_CLUSTER_TOL = 1e-8


# ------------------------------------------------------------------ polynomial helpers

def as_poly(coeffs):
    """Ascending complex coefficient array, trailing zeros trimmed."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.nonzero(np.abs(c) > 0)[0]
    if len(nz) == 0:
        return np.zeros(1, dtype=complex)
    return c[:nz[-1] + 1].copy()


def poly_mul(a, b):
    return npoly.polymul(a, b)


def poly_val(coeffs, z):
    return npoly.polyval(z, np.asarray(coeffs, dtype=complex))


def poly_der(coeffs):
    return npoly.polyder(np.asarray(coeffs, dtype=complex))


def poly_int(coeffs):
    """Antiderivative with zero constant term."""
    return npoly.polyint(np.asarray(coeffs, dtype=complex), lbnd=0, k=0)


def poly_shift(coeffs, z0):
    """Coefficients of p(z0 + xi) as a polynomial in xi."""
    if z0 == 0:
        return np.asarray(coeffs, dtype=complex)
    shifted = Polynomial(np.asarray(coeffs, dtype=complex))(Polynomial([z0, 1.0]))
    return shifted.coef


# ------------------------------------------------------------------ surface data

@dataclass(frozen=True)
class WeierstrassData:
    """Polynomial pair (h, g); g is the stereographic Gauss map."""

    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h", as_poly(self.h))
        object.__setattr__(self, "g", as_poly(self.g))
        if np.all(np.abs(self.h) == 0):
            raise ValidationError("h-zero", "h must not be identically zero")
        if len(self.h) - 1 > MAX_DEGREE or len(self.g) - 1 > MAX_DEGREE:
            raise ValidationError("degree-cap", f"degrees are capped at {MAX_DEGREE}")

    @classmethod
    def quartic_example(cls, a, b):
        """The degree-3 wrap h = 4z^3 with Gauss map g = a z^2 + b z^3."""
        return cls(h=[0, 0, 0, 4.0], g=[0, 0, a, b])

    def to_dict(self):
        return {"h": [[c.real, c.imag] for c in self.h],
                "g": [[c.real, c.imag] for c in self.g]}

    @classmethod
    def from_dict(cls, d):
        def parse(entries):
            out = []
            for e in entries:
                if isinstance(e, str):
                    re_s, im_s = e.split(",")
                    out.append(complex(float(re_s), float(im_s)))
                elif isinstance(e, (list, tuple)):
                    out.append(complex(e[0], e[1]))
                else:
                    out.append(complex(e))
            return out
        try:
            return cls(h=parse(d["h"]), g=parse(d["g"]))
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError("surface-file", f"malformed surface description: {exc}")

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def derive_fz(data):
    """The three z-derivative polynomials of the representation."""
    h, g = data.h, data.g
    g2 = poly_mul(g, g)
    one = np.zeros(max(len(g2), 1), dtype=complex)
    one[0] = 1.0
    f1 = poly_mul(h, one - g2) * 0.5
    f2 = poly_mul(h, one + g2) * (-0.5j)
    f3 = poly_mul(h, g)
    return as_poly(f1), as_poly(f2), as_poly(f3)


def conformality_residual(f1z, f2z, f3z):
    """Sum of squares of a derivative triple; zero iff conformal."""
    n = max(len(f1z), len(f2z), len(f3z)) * 2
    acc = np.zeros(n, dtype=complex)
    for c in (f1z, f2z, f3z):
        sq = poly_mul(c, c)
        acc[:len(sq)] += sq
    return as_poly(acc)


def conformality_check(data, tol=1e-12):
    """True iff the squared derivative triple cancels identically."""
    res = conformality_residual(*derive_fz(data))
    return bool(np.all(np.abs(res) < tol)), res


@dataclass(frozen=True)
class SurfaceMap:
    """Exact antiderivatives F of f_z, with f = 2 Re F and F(0) = 0."""

    data: WeierstrassData
    F1: np.ndarray
    F2: np.ndarray
    F3: np.ndarray

    def holomorphic(self):
        return self.F1, self.F2, self.F3

    def point(self, z):
        """Surface point(s) f(z) = 2 Re F(z); shape (..., 3)."""
        z = np.asarray(z, dtype=complex)
        comps = [2 * poly_val(c, z).real for c in (self.F1, self.F2, self.F3)]
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    def fz(self, z):
        z = np.asarray(z, dtype=complex)
        f1z, f2z, f3z = derive_fz(self.data)
        return np.stack(np.broadcast_arrays(
            poly_val(f1z, z), poly_val(f2z, z), poly_val(f3z, z)), axis=-1)

    def fx(self, z):
        return 2 * self.fz(z).real

    def fy(self, z):
        return -2 * self.fz(z).imag

    def normal(self, z):
        """Unit normal from the Gauss map; defined wherever g is (everywhere)."""
        z = np.asarray(z, dtype=complex)
        gv = poly_val(self.data.g, z)
        denom = np.abs(gv) ** 2 + 1.0
        n = np.stack(np.broadcast_arrays(
            2 * gv.real, 2 * gv.imag, np.abs(gv) ** 2 - 1.0), axis=-1)
        return n / denom[..., None]

    def scale(self, radius, center=0j):
        """Deterministic size estimate: max |f - f(center)| on two circles."""
        angles = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        zs = center + np.concatenate([radius * np.exp(1j * angles),
                                      0.5 * radius * np.exp(1j * angles)])
        d = self.point(zs) - self.point(np.asarray(center))
        return float(np.max(np.linalg.norm(d, axis=-1)))


def build_surface(data):
    f1z, f2z, f3z = derive_fz(data)
    return SurfaceMap(data, poly_int(f1z), poly_int(f2z), poly_int(f3z))


# ------------------------------------------------------------------ branch points

@dataclass(frozen=True)
class BranchPointRecord:
    """A zero of h: location, branching order, and the leading tangent data.

    c = a_vec + i b_vec is normalized so that locally
    f(z) - f(z0) ~ Re{ conj(c) (z - z0)^m }, which makes (a_vec, b_vec) the
    oriented frame pair in which the wrap coordinate comes out holomorphic.
    """

    z0: complex
    order: int
    m: int
    c: np.ndarray

    @property
    def a_vec(self):
        return self.c.real

    @property
    def b_vec(self):
        return self.c.imag

    def bilinear_cc(self):
        return complex(np.sum(self.c * self.c))


def detect_branch_points(data, radius):
    """Roots of h inside |z| < radius, with multiplicities, as branch records."""
    if radius <= 0:
        raise ValidationError("radius", "radius must be positive")
    h = data.h
    if len(h) == 1:
        return []
    try:
        roots = np.roots(h[::-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - requires LAPACK failure
        raise NumericalError("rootfind-failed", str(exc))

    clusters = []
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        for cluster in clusters:
            if abs(r - cluster[0] / cluster[1]) <= ROOT_CLUSTER_TOL:
                cluster[0] += r
                cluster[1] += 1
                break
        else:
            clusters.append([r, 1])

    f1z, f2z, f3z = derive_fz(data)
    records = []
    for total, mult in clusters:
        z0 = complex(total / mult)
        if abs(z0) >= radius:
            continue
        m = mult + 1
        v = np.array([poly_shift(c, z0)[mult] if mult < len(c) else 0.0
                      for c in (f1z, f2z, f3z)], dtype=complex)
        c = 2.0 * np.conjugate(v) / m
        records.append(BranchPointRecord(z0=z0, order=mult, m=m, c=c))
    records.sort(key=lambda r: (abs(r.z0), r.z0.real, r.z0.imag))
    return records


# ------------------------------------------------------------------ energy and area

def _pointwise_energy_area(fx, fy):
    e = 0.5 * (np.sum(fx * fx, axis=-1) + np.sum(fy * fy, axis=-1))
    a = np.linalg.norm(np.cross(fx, fy), axis=-1)
    return e, a


def mesh_energy_area(surface, mesh):
    """One-point (barycenter) quadrature of energy and area densities using
    the exact surface derivatives.  Always returns E >= A."""
    mesh.validate()
    areas = mesh.param_areas()
    bary = mesh.vertices[mesh.triangles].mean(axis=1)
    e, a = _pointwise_energy_area(surface.fx(bary), surface.fy(bary))
    return float(np.sum(e * areas)), float(np.sum(a * areas))


def discrete_energy_area(mesh):
    """Energy and area of the piecewise-linear map defined by the stored
    vertex images; the affine derivative is constant per triangle."""
    mesh.validate()
    if mesh.images is None:
        raise ValidationError("mesh-images", "mesh has no vertex images")
    areas = mesh.param_areas()
    p = mesh.vertices[mesh.triangles]
    q = mesh.images[mesh.triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    e1 = q[:, 1] - q[:, 0]
    e2 = q[:, 2] - q[:, 0]
    det = d1.real * d2.imag - d1.imag * d2.real
    # J = [fx fy] solves J @ [d1 d2] = [e1 e2] columnwise
    fx = (e1 * d2.imag[:, None] - e2 * d1.imag[:, None]) / det[:, None]
    fy = (-e1 * d2.real[:, None] + e2 * d1.real[:, None]) / det[:, None]
    e, a = _pointwise_energy_area(fx, fy)
    return float(np.sum(e * areas)), float(np.sum(a * areas))


def fill_images(surface, mesh):
    """Mesh with the per-vertex surface images evaluated."""
    return ParamMesh(mesh.vertices, mesh.triangles, surface.point(mesh.vertices))

"""Area-preserving cut-and-paste comparison map at a true branch point.

Two matched self-intersection arcs cut the wrap-coordinate disk D into two
curvilinear pentagons.  The unit disk B1 is cut along its x-axis and along
the y-axis slit |y| <= 1/2, and a piecewise map Q: B1 -> D sends the upper
and lower half-disk pentagons onto them so that

* Q is continuous across the x-axis and discontinuous across the slit,
* both slit sides at the same |y| land on the two arcs at the same arc
  parameter, so the composed surface map stays continuous there,
* the two images tile D up to the cut arcs, so the composed surface has
  the same area as the surface over D,

while the surface tangent planes jump across the slit image: the pasted
surface is as cheap as the original but has a crease, which is the
testable content of the comparison construction.

Pentagon interiors are filled by transfinite (Coons) boundary blending;
each quadrant of B1 is one patch whose top edge runs along the slit into
the branch point and back out along the sector midline.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .ioutil import atomic_write_text
from .curvetrace import invert_wrap, poly_val
from .meshes import disk_mesh


def _triangle_areas(points):
    d1 = points[:, 1] - points[:, 0]
    d2 = points[:, 2] - points[:, 0]
    return 0.5 * np.linalg.norm(np.cross(d1, d2), axis=-1)


def _plane_signed_areas(z):
    d1 = z[:, 1] - z[:, 0]
    d2 = z[:, 2] - z[:, 0]
    return 0.5 * (d1.real * d2.imag - d1.imag * d2.real)


# ------------------------------------------------------------------ decomposition

@dataclass
class PentagonDecomposition:
    """Matched arc pair, cut at the disk boundary, with interpolators.

    The first arc gamma1 is the traced curve truncated at |w| = d_radius
    and parameterized proportionally to arclength on [0, eps]; gamma2 is
    its exact zeta^k rotation, so the pairing invariant holds identically
    and the surface images of matched parameters agree within the traced
    residual tolerance.
    """

    surface: object
    nf: object
    k: int
    d_radius: float
    eps: float
    s_arc: np.ndarray
    w_arc: np.ndarray
    ang_arc: np.ndarray
    residual_max: float
    scale: float

    @property
    def zeta(self):
        return self.nf.zeta(self.k)

    @property
    def length(self):
        return float(self.s_arc[-1])

    @property
    def A1(self):
        return self.gamma1_at(0.5)

    @property
    def A2(self):
        return self.zeta * self.A1

    @property
    def end1(self):
        return self.gamma1_at(1.0)

    @property
    def end2(self):
        return self.zeta * self.end1

    @property
    def theta_end(self):
        return float(np.angle(self.end1))

    def _chord_at(self, u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        s = u * self.length
        return np.interp(s, self.s_arc, self.w_arc.real) + \
            1j * np.interp(s, self.s_arc, self.w_arc.imag)

    def angle_at_radius(self, r):
        radii = np.abs(self.w_arc)
        return np.interp(r, radii, self.ang_arc)

    def _gap(self, w):
        xi1 = invert_wrap(self.nf, w)
        xi2 = invert_wrap(self.nf, self.zeta * np.asarray(w))
        return 2 * (poly_val(self.nf.p3_hol, xi1).real - poly_val(self.nf.p3_hol, xi2).real)

    def _correct_transverse(self, w):
        """Newton-project chord points onto the exact intersection curve."""
        w = np.asarray(w, dtype=complex).copy()
        live = np.abs(w) > 0
        for _ in range(6):
            if not np.any(live):
                break
            h = 1e-6 * np.abs(w[live])
            H = self._gap(w[live])
            gx = (self._gap(w[live] + h) - self._gap(w[live] - h)) / (2 * h)
            gy = (self._gap(w[live] + 1j * h) - self._gap(w[live] - 1j * h)) / (2 * h)
            g = gx + 1j * gy
            ok = np.abs(g) > 1e-300
            step = np.where(ok, H * g / np.maximum(np.abs(g) ** 2, 1e-300), 0.0)
            w[live] = w[live] - step
            live_new = np.zeros_like(live)
            live_new[live] = np.abs(H) > 1e-14 * self.scale
            live = live_new
        return w

    def _correct_angular(self, w):
        """Correct along the circle |w| = const (used for the arc endpoint)."""
        w = complex(w)
        r = abs(w)
        alpha = cmath.phase(w)
        for _ in range(30):
            H = float(self._gap(np.asarray(r * cmath.exp(1j * alpha))))
            if abs(H) <= 1e-14 * self.scale:
                break
            h = 1e-7
            dH = (float(self._gap(np.asarray(r * cmath.exp(1j * (alpha + h))))) -
                  float(self._gap(np.asarray(r * cmath.exp(1j * (alpha - h)))))) / (2 * h)
            if abs(dH) < 1e-300:
                break
            alpha -= H / dH
        return r * cmath.exp(1j * alpha)

    def gamma1_at(self, u, correct=True):
        """Arc point at parameter fraction u in [0, 1] (u = t/eps)."""
        scalar = np.isscalar(u) or np.asarray(u).ndim == 0
        w = np.atleast_1d(self._chord_at(u))
        if correct:
            at_end = np.isclose(np.atleast_1d(u).astype(float), 1.0)
            inner = ~at_end
            if np.any(inner):
                w[inner] = self._correct_transverse(w[inner])
            if np.any(at_end):
                w[at_end] = self._correct_angular(self._chord_at(1.0))
        return complex(w[0]) if scalar else w

    def gamma2_at(self, u, correct=True):
        return self.zeta * self.gamma1_at(u, correct)

    def vertices(self):
        return {"origin": 0j, "A1": self.A1, "A2": self.A2,
                "gamma1_end": self.end1, "gamma2_end": self.end2}


def build_decomposition(surface, nf, curves, eps=None, d_radius=0.25):
    """Cut a matched pair of intersection arcs at the disk boundary.

    ``curves`` is a pair of traced ZeroCurve objects from the same family
    whose start directions differ by the sheet rotation (the second one
    validates the pairing; the arc actually used for gamma2 is the exact
    rotation of gamma1, which is what the identification needs).
    """
    if not isinstance(curves, (tuple, list)) or len(curves) != 2:
        raise ValidationError("pair-mismatch", "need a pair of matched curves")
    c1, c2 = curves
    if c1.k != c2.k:
        raise ValidationError("pair-mismatch", "curves belong to different sheet families")
    k, m = c1.k, nf.m
    delta = 2 * math.pi * k / m
    gap = (c2.theta_start - c1.theta_start - delta) % (2 * math.pi)
    if min(gap, 2 * math.pi - gap) > 0.02:
        raise ValidationError("pair-mismatch",
                              f"start directions differ by {c2.theta_start - c1.theta_start:.4f}, "
                              f"expected the sheet rotation {delta:.4f}")

    w_full = np.concatenate([[0j], c1.w])
    radii = np.abs(w_full)
    cross = np.nonzero(radii >= d_radius)[0]
    if len(cross) == 0:
        raise ValidationError("arc-short",
                              f"curve traced to radius {radii.max():.4g} < d_radius {d_radius}")
    idx = cross[0]
    wa, wb = w_full[idx - 1], w_full[idx]
    dw = wb - wa
    qa = abs(dw) ** 2
    qb = 2 * (wa * dw.conjugate()).real
    qc = abs(wa) ** 2 - d_radius ** 2
    sig = (-qb + math.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
    w_cross = wa + sig * dw

    w_arc = np.concatenate([w_full[:idx], [w_cross]])
    seg = np.abs(np.diff(w_arc))
    s_arc = np.concatenate([[0.0], np.cumsum(seg)])
    length = float(s_arc[-1])
    full_length = float(np.sum(np.abs(np.diff(w_full))))
    if eps is None:
        eps = length
    elif eps > full_length * (1 + 1e-12):
        raise ValidationError("arc-short",
                              f"parameter cut {eps:.4g} exceeds traced arc length {full_length:.4g}")

    if np.any(np.diff(np.abs(w_arc)) <= 0):
        raise NumericalError("arc-nonmonotone",
                             "arc radius is not increasing; cannot build the sector frame")

    angles = np.unwrap(np.angle(w_arc[1:]))
    ang_arc = np.concatenate([[angles[0]], angles])

    scale = max(surface.scale(1.2 * d_radius / nf.coord_scale, nf.z0), 1e-6)
    decomp = PentagonDecomposition(surface=surface, nf=nf, k=k, d_radius=d_radius,
                                   eps=float(eps), s_arc=s_arc, w_arc=w_arc,
                                   ang_arc=ang_arc, residual_max=0.0, scale=scale)

    # check that matched parameters are genuine self-intersections
    us = np.linspace(0.0, 1.0, 101)
    g1 = decomp.gamma1_at(us)
    xi1 = invert_wrap(nf, g1)
    xi2 = invert_wrap(nf, decomp.zeta * g1)
    p1 = surface.point(nf.z0 + xi1)
    p2 = surface.point(nf.z0 + xi2)
    res = float(np.max(np.linalg.norm(p1 - p2, axis=-1)))
    decomp.residual_max = res
    if res > 1e-8 * scale:
        raise NumericalError("pair-mismatch",
                             f"arc identification residual {res:g} exceeds tolerance")
    return decomp


# ------------------------------------------------------------------ the map Q

@dataclass
class PatchMesh:
    quadrant: int
    B: np.ndarray
    W: np.ndarray
    XI: np.ndarray
    F: np.ndarray
    triangles: np.ndarray


@dataclass
class QMesh:
    patches: list
    resolution: int

    def area_image(self):
        total = 0.0
        for p in self.patches:
            pts = p.F.reshape(-1, 3)[p.triangles]
            total += float(np.sum(_triangle_areas(pts)))
        return total

    def fold_stats(self):
        bad = n = 0
        for p in self.patches:
            zb = p.B.ravel()[p.triangles]
            zw = p.W.ravel()[p.triangles]
            sb = _plane_signed_areas(zb)
            sw = _plane_signed_areas(zw)
            bad += int(np.sum(sb * sw <= 0))
            n += len(sb)
        return bad, n


class PiecewiseMapQ:
    """Q: B1 -> D as four Coons patches, one per quadrant of B1.

    Boundary prescriptions (upper pentagon; the lower one mirrors them):
    the positive x-axis runs along the outer half of the first arc, the
    right slit side runs back down the inner half into the branch point,
    and the half-circle maps to the disk boundary, so the named points go
    c1 -> gamma1(eps), b1 -> gamma1(eps/2), a -> 0, b2 -> gamma2(eps/2),
    c2 -> gamma2(eps).  Q is continuous across the x-axis and across the
    y-axis above the slit (both half-pentagons share the sector midline),
    and discontinuous across the slit itself.
    """

    def __init__(self, decomp):
        self.decomp = decomp
        d = decomp.d_radius
        delta = 2 * math.pi * decomp.k / decomp.nf.m
        self.delta = delta
        theta_end = decomp.theta_end
        ang_shift = theta_end - decomp.angle_at_radius(d)

        def midline(lam, lower):
            lam = np.asarray(lam, dtype=float)
            ang = decomp.angle_at_radius(lam * d) + ang_shift + delta / 2
            if lower:
                ang = ang + math.pi
            return lam * d * np.exp(1j * ang)

        def top_edge(gamma, lower):
            def edge(s):
                s = np.asarray(s, dtype=float)
                out = np.empty(s.shape, dtype=complex)
                lo = s <= 0.5
                out[lo] = gamma(0.5 - s[lo])
                out[~lo] = midline(2 * s[~lo] - 1, lower)
                return out
            return edge

        def arc_edge(start_angle, sweep):
            def edge(t):
                return d * np.exp(1j * (start_angle + np.asarray(t, dtype=float) * sweep))
            return edge

        g1, g2 = decomp.gamma1_at, decomp.gamma2_at
        wide = 2 * math.pi - delta
        self.edges = {
            1: {"b": lambda s: g1((1 + np.asarray(s)) / 2),
                "t": top_edge(g1, lower=False),
                "l": decomp.A1,
                "r": arc_edge(theta_end, delta / 2)},
            2: {"b": lambda s: g2((1 + np.asarray(s)) / 2),
                "t": top_edge(g2, lower=False),
                "l": decomp.A2,
                "r": arc_edge(theta_end + delta, -delta / 2)},
            4: {"b": lambda s: g1((1 + np.asarray(s)) / 2),
                "t": top_edge(g1, lower=True),
                "l": decomp.A1,
                "r": arc_edge(theta_end, -wide / 2)},
            3: {"b": lambda s: g2((1 + np.asarray(s)) / 2),
                "t": top_edge(g2, lower=True),
                "l": decomp.A2,
                "r": arc_edge(theta_end + delta, wide / 2)},
        }

    # B-side reference coordinates: s = radius, t in [0,1] from the x-axis
    # edge to the slit edge.
    @staticmethod
    def b_point(quadrant, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        theta = {1: t * np.pi / 2, 2: np.pi - t * np.pi / 2,
                 3: np.pi + t * np.pi / 2, 4: -t * np.pi / 2}[quadrant]
        return s * np.exp(1j * theta)

    @staticmethod
    def b_coords(quadrant, p):
        p = np.asarray(p, dtype=complex)
        s = np.abs(p)
        theta = np.angle(p)
        if quadrant == 1:
            t = theta / (np.pi / 2)
        elif quadrant == 2:
            t = (np.pi - theta) / (np.pi / 2)
        elif quadrant == 3:
            t = (np.mod(theta, 2 * np.pi) - np.pi) / (np.pi / 2)
        else:
            t = -theta / (np.pi / 2)
        return s, np.where(s == 0, 0.0, t)

    def coons(self, quadrant, s, t):
        e = self.edges[quadrant]
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        eb, et = e["b"](s), e["t"](s)
        el = np.full(t.shape, e["l"], dtype=complex) if np.ndim(t) else e["l"]
        er = e["r"](t)
        p00, p10 = complex(e["b"](0.0)), complex(e["b"](1.0))
        p01, p11 = complex(e["t"](0.0)), complex(e["t"](1.0))
        return ((1 - t) * eb + t * et + (1 - s) * el + s * er
                - ((1 - s) * (1 - t) * p00 + s * (1 - t) * p10
                   + (1 - s) * t * p01 + s * t * p11))

    def evaluate(self, p, quadrant=None):
        """Q at a point of B1.  On the axes and the slit the side matters;
        pass the quadrant to select it."""
        p = complex(p)
        if quadrant is None:
            x, y = p.real, p.imag
            quadrant = 1 if (x >= 0 and y >= 0) else 2 if y >= 0 else 3 if x <= 0 else 4
        s, t = self.b_coords(quadrant, p)
        return complex(self.coons(quadrant, s, t))

    def seam_point(self, y, side):
        """Prescribed slit values: the right side (quadrants 1/4) lies on
        gamma1, the left side (quadrants 2/3) on gamma2, both at arc
        fraction 1/2 - |y| so the branch point sits at |y| = 1/2."""
        if not -0.5 <= y <= 0.5:
            raise ValidationError("seam-range", "slit is |y| <= 1/2")
        u = 0.5 - abs(y)
        if side in ("right", 1, 4):
            return complex(self.decomp.gamma1_at(u))
        return complex(self.decomp.gamma2_at(u))

    def named_points(self):
        d = self.decomp
        return {"a": 0j, "e": 0j,
                "b1": d.A1, "d1": d.A1, "b2": d.A2, "d2": d.A2,
                "c1": d.end1, "c2": d.end2}


def build_q(decomp, resolution=256):
    """Construct Q and its evaluated mesh on B1.

    ``resolution`` counts grid intervals across the disk diameter; each
    quadrant patch carries a (resolution/2)^2 reference grid.  Fold-over
    (opposite orientation of a parameter triangle and its image) beyond
    0.1% of triangles aborts the construction.
    """
    q = PiecewiseMapQ(decomp)
    n = max(8, resolution // 2)
    nf = decomp.nf
    svals = np.linspace(0.0, 1.0, n + 1)
    tvals = np.linspace(0.0, 1.0, n + 1)
    S, Tg = np.meshgrid(svals, tvals, indexing="ij")
    patches = []
    for quadrant in (1, 2, 3, 4):
        W = q.coons(quadrant, S, Tg)
        B = q.b_point(quadrant, S, Tg)
        XI = invert_wrap(nf, W)
        F = decomp.surface.point(nf.z0 + XI)
        tris = []
        for i in range(n):
            for j in range(n):
                v00 = i * (n + 1) + j
                v01 = v00 + 1
                v10 = v00 + (n + 1)
                v11 = v10 + 1
                tris.append((v00, v10, v11))
                tris.append((v00, v11, v01))
        tris = np.array(tris)
        zb = B.ravel()[tris]
        keep = np.abs(_plane_signed_areas(zb)) > 1e-16
        patches.append(PatchMesh(quadrant=quadrant, B=B, W=W, XI=XI, F=F,
                                 triangles=tris[keep]))
    mesh = QMesh(patches=patches, resolution=resolution)
    bad, total = mesh.fold_stats()
    if bad > 0.001 * total:
        raise NumericalError("q-foldover",
                             f"{bad} of {total} cells change orientation")
    return q, mesh


# ------------------------------------------------------------------ seam checks

@dataclass(frozen=True)
class SeamReport:
    max_continuity_jump: float
    rel_area_diff: float
    min_tangent_angle: float
    area_q: float
    area_d: float
    resolution: int
    scale: float
    window: tuple

    def to_dict(self):
        return {"max_continuity_jump": self.max_continuity_jump,
                "rel_area_diff": self.rel_area_diff,
                "min_tangent_angle": self.min_tangent_angle,
                "area_q": self.area_q, "area_d": self.area_d,
                "resolution": self.resolution, "scale": self.scale,
                "window": list(self.window)}

    def to_text(self):
        return (f"continuity jump (max over slit): {self.max_continuity_jump:.6g}\n"
                f"surface scale: {self.scale:.6g}\n"
                f"area over B1 via Q: {self.area_q:.9g}\n"
                f"area over D: {self.area_d:.9g}\n"
                f"relative area difference: {self.rel_area_diff:.6g}\n"
                f"min tangent-plane angle on |y| in {list(self.window)}: "
                f"{self.min_tangent_angle:.6g} rad\n")


def seam_checks(surface, qmesh, decomp, window=(0.1, 0.4), n_seam=512):
    """Continuity of the composed map across the slit, area agreement with
    an independent disk mesh, and the tangent-plane crease angle."""
    nf = decomp.nf

    us = np.linspace(0.0, 1.0, n_seam)
    g1 = decomp.gamma1_at(us)
    xi1 = invert_wrap(nf, g1)
    xi2 = invert_wrap(nf, decomp.zeta * g1)
    f1 = surface.point(nf.z0 + xi1)
    f2 = surface.point(nf.z0 + xi2)
    jump = float(np.max(np.linalg.norm(f1 - f2, axis=-1)))

    area_q = qmesh.area_image()
    n_patch = max(8, qmesh.resolution // 2)
    dmesh = disk_mesh(8 * n_patch ** 2, radius=decomp.d_radius)
    xi = invert_wrap(nf, dmesh.vertices)
    pts = surface.point(nf.z0 + xi)
    area_d = float(np.sum(_triangle_areas(pts[dmesh.triangles])))
    rel = abs(area_q - area_d) / area_d

    # tangent planes of the two sheets along the slit image; |y| in the
    # window maps to arc fraction u = 1/2 - |y|
    uu = np.linspace(0.5 - window[1], 0.5 - window[0], 601)
    g = decomp.gamma1_at(uu, correct=False)
    z1 = nf.z0 + invert_wrap(nf, g)
    z2 = nf.z0 + invert_wrap(nf, decomp.zeta * g)
    n1 = surface.normal(z1)
    n2 = surface.normal(z2)
    dots = np.clip(np.abs(np.sum(n1 * n2, axis=-1)), 0.0, 1.0)
    min_angle = float(np.min(np.arccos(dots)))

    return SeamReport(max_continuity_jump=jump, rel_area_diff=float(rel),
                      min_tangent_angle=min_angle, area_q=area_q, area_d=area_d,
                      resolution=qmesh.resolution, scale=decomp.scale,
                      window=tuple(window))


def write_qmesh_csv(qmesh, path):
    """CSV export: B1 coordinates, D coordinates, and the surface image."""
    lines = ["quadrant,bx,by,wx,wy,f1,f2,f3"]
    for p in qmesh.patches:
        B = p.B.ravel()
        W = p.W.ravel()
        F = p.F.reshape(-1, 3)
        for i in range(len(B)):
            lines.append(f"{p.quadrant},{B[i].real:.12g},{B[i].imag:.12g},"
                         f"{W[i].real:.12g},{W[i].imag:.12g},"
                         f"{F[i][0]:.12g},{F[i][1]:.12g},{F[i][2]:.12g}")
    text = "\n".join(lines) + "\n"
    atomic_write_text(path, text)
    return text

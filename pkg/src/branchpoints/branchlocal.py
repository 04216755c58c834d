"""Local analysis at a branch point: normal form, sheet differences,
proper index, and the direction geometry of self-intersection curves.

The pipeline at a branch point of branching number m:

1. rotate coordinates so the leading tangent pair spans the first two axes
   and the combined first coordinate p1 + i p2 has a holomorphic leading
   monomial s * xi^m (s > 0);
2. rescale xi so the leading coefficient is 1, take the m-th root to get
   the wrap coordinate w, and revert it;
3. push the third coordinate through the reverted series to get the height
   phi(w, conj w).

Rotating w by the m-th roots of unity permutes the m sheets; the height
gap between sheet k and the base sheet is the coefficientwise multiplier
series Phi_k, whose leading term R{A w^N} fixes the proper index N - 1 and
the 2N directions along which the sheets cross.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .biseries import BiSeries
from .errors import NumericalError, ValidationError
from .weierstrass import poly_shift

DEFAULT_TRUNC = 12


@dataclass(frozen=True)
class NormalForm:
    """Adapted frame and series data at one branch point.

    The local coordinate is xi = z - z0; the series live in the rescaled
    coordinate zt = coord_scale * xi, in which p1 + i p2 = zt^m + higher.
    pi_hol / pi_anti / p3_hol are exact polynomials in xi:
    p1 + i p2 = pi_hol(xi) + conj(pi_anti(xi)) and p3 = 2 Re p3_hol(xi).
    """

    m: int
    frame: np.ndarray
    coord_scale: float
    z0: complex
    f0: np.ndarray
    pi_series: BiSeries
    w_of_z: BiSeries
    z_of_w: BiSeries
    phi: BiSeries
    pi_hol: np.ndarray
    pi_anti: np.ndarray
    p3_hol: np.ndarray

    @property
    def trunc(self):
        return self.phi.trunc

    def zeta(self, k=1):
        return cmath.exp(2j * math.pi * k / self.m)


def _hol_antihol_biseries(hol, anti, trunc):
    terms = {}
    for k, c in enumerate(hol):
        if k >= 1 and abs(c) > 0:
            terms[(k, 0)] = terms.get((k, 0), 0.0) + c
    for k, c in enumerate(anti):
        if k >= 1 and abs(c) > 0:
            terms[(0, k)] = terms.get((0, k), 0.0) + np.conjugate(c)
    return BiSeries(terms, trunc)


def normal_form(surface, bp, trunc=DEFAULT_TRUNC):
    """Adapted coordinates and wrap-parameter series at a branch point."""
    m = bp.m
    if trunc < m + 4:
        raise ValidationError("trunc-too-small",
                              f"need truncation >= m+4 = {m + 4}, got {trunc}")
    a_vec, b_vec = bp.a_vec, bp.b_vec
    s = float(np.linalg.norm(a_vec))
    if s <= 1e-14:
        raise ValidationError("degenerate-leading-vector",
                              "leading tangent vector has zero length")
    e1 = a_vec / s
    e2 = b_vec - np.dot(b_vec, e1) * e1
    n2 = np.linalg.norm(e2)
    if n2 <= 1e-14:
        raise ValidationError("degenerate-leading-vector",
                              "leading tangent pair is collinear")
    e2 = e2 / n2
    e3 = np.cross(e1, e2)
    frame = np.vstack([e1, e2, e3])

    # exact local antiderivatives G_k(xi) = F_k(z0 + xi) - F_k(z0)
    G = []
    for F in surface.holomorphic():
        sh = poly_shift(F, bp.z0)
        sh[0] = 0.0
        G.append(sh)
    n = max(len(g) for g in G)
    Gm = np.zeros((3, n), dtype=complex)
    for i, g in enumerate(G):
        Gm[i, :len(g)] = g

    pi_hol = (e1 + 1j * e2) @ Gm
    pi_anti = (e1 - 1j * e2) @ Gm
    p3_hol = e3 @ Gm

    lam = s ** (1.0 / m)
    scale_pow = lam ** np.arange(n)
    pi_series = _hol_antihol_biseries(pi_hol / scale_pow, pi_anti / scale_pow, trunc)
    p3_series = _hol_antihol_biseries(p3_hol / scale_pow, p3_hol / scale_pow, trunc)

    w_of_z = pi_series.mth_root(m)
    z_of_w = w_of_z.revert()
    phi = p3_series.compose(z_of_w)

    return NormalForm(m=m, frame=frame, coord_scale=lam, z0=bp.z0,
                      f0=surface.point(np.asarray(bp.z0)),
                      pi_series=pi_series, w_of_z=w_of_z, z_of_w=z_of_w, phi=phi,
                      pi_hol=pi_hol, pi_anti=pi_anti, p3_hol=p3_hol)


# ------------------------------------------------------------------ sheet differences

@dataclass(frozen=True)
class SheetDifference:
    """Height gap between the base sheet and the zeta_m^k rotated sheet."""

    k: int
    m: int
    series: BiSeries
    N: int
    A: complex
    directions_param: np.ndarray
    directions_image: np.ndarray

    @property
    def is_zero(self):
        return self.N == 0

    def image_rays(self, tol=1e-9):
        return group_rays(self.directions_image, tol)


def sheet_difference_series(phi, m, k):
    """Coefficientwise multiplier rule: c_ij -> c_ij (1 - zeta^(k(i-j))).

    Divisibility of k(i-j) by m is decided in integer arithmetic, so killed
    terms vanish exactly rather than to roundoff.
    """
    terms = {}
    for (i, j), c in phi.terms.items():
        r = (k * (i - j)) % m
        if r == 0:
            continue
        terms[(i, j)] = c * (1 - cmath.exp(2j * math.pi * r / m))
    return BiSeries(terms, phi.trunc)


def proper_index(series, tol=None):
    """Leading data (N, A) of a sheet-difference series.

    N is the smallest total order carrying a coefficient above tol and A
    is twice the (N, 0) coefficient, so the leading block reads R{A w^N}.
    The block must consist of the conjugate pair {(N,0), (0,N)} alone; a
    mixed leading key is reported as a structural failure.  Returns the
    (0, 0) sentinel when everything is below tol ("vanishes to truncation
    order").
    """
    if tol is None:
        tol = 1e-9 * series.max_modulus()
    live = {k: c for k, c in series.terms.items() if abs(c) > tol}
    if not live:
        return 0, 0j
    N = min(i + j for (i, j) in live)
    block = {k: c for k, c in live.items() if k[0] + k[1] == N}
    if any(i != 0 and j != 0 for (i, j) in block):
        raise NumericalError("nonstandard-leading-form",
                             f"mixed keys at leading order {N}: {sorted(block)}")
    A = 2 * block.get((N, 0), 0j)
    other = block.get((0, N), 0j)
    scale = max(abs(A), abs(other), 1e-300)
    if abs(A / 2 - other.conjugate()) > 1e-6 * scale:
        raise NumericalError("nonstandard-leading-form",
                             "leading block is not a conjugate pair")
    return N, A


def zero_directions(N, A):
    """The 2N angles solving R{A e^(i N theta)} = 0, equally spaced pi/N."""
    if N < 1 or A == 0:
        raise ValidationError("no-leading-term", "need N >= 1 and A != 0")
    base = (math.pi / 2 - cmath.phase(A)) / N
    return np.mod(base + np.pi * np.arange(2 * N) / N, 2 * np.pi)


def image_directions(m, params):
    """Tangent-plane rays: wrap angles are multiplied by m; multiset kept."""
    return np.mod(m * np.asarray(params, dtype=float), 2 * np.pi)


def group_rays(angles, tol=1e-9):
    """Deduplicated circular view: sorted [(angle, multiplicity)]."""
    angles = np.sort(np.mod(np.asarray(angles, dtype=float), 2 * np.pi))
    if len(angles) == 0:
        return []
    groups = [[angles[0], 1]]
    for a in angles[1:]:
        if a - groups[-1][0] / groups[-1][1] <= tol:
            groups[-1][0] += a
            groups[-1][1] += 1
        else:
            groups.append([a, 1])
    rays = [(total / count, count) for total, count in groups]
    # wraparound merge
    if len(rays) > 1 and (2 * np.pi - rays[-1][0]) + rays[0][0] <= tol:
        a0, c0 = rays.pop(0)
        a1, c1 = rays.pop()
        rays.insert(0, ((a1 - 2 * np.pi) * c1 / (c0 + c1) + a0 * c0 / (c0 + c1), c0 + c1))
        if rays[0][0] < 0:
            rays[0] = (rays[0][0] + 2 * np.pi, rays[0][1])
            rays.sort()
    return rays


def sheet_difference(nf, k, tol=None):
    if not 1 <= k <= nf.m - 1:
        raise ValidationError("sheet-index", f"need 1 <= k <= m-1 = {nf.m - 1}, got {k}")
    series = sheet_difference_series(nf.phi, nf.m, k)
    N, A = proper_index(series, tol)
    if N == 0:
        empty = np.zeros(0)
        return SheetDifference(k=k, m=nf.m, series=series, N=0, A=0j,
                               directions_param=empty, directions_image=empty)
    params = zero_directions(N, A)
    return SheetDifference(k=k, m=nf.m, series=series, N=N, A=A,
                           directions_param=params,
                           directions_image=image_directions(nf.m, params))


def mirror_pair_residual(nf, k):
    """Max coefficient gap in Phi_(m-k)(w) = -Phi_k(zeta^-k w); the families
    k and m-k are computed independently and this identity cross-checks them."""
    lhs = sheet_difference_series(nf.phi, nf.m, nf.m - k)
    rot = BiSeries.monomial(nf.zeta(-k), 1, 0, nf.trunc)
    rhs = -sheet_difference_series(nf.phi, nf.m, k).compose(rot)
    diff = lhs - rhs
    return max((abs(c) for c in diff.terms.values()), default=0.0)


def classify_branch(nf, tol=None):
    """'true-branch' when some sheet family has a nonzero leading term,
    'false-candidate' when all vanish to the truncation order (reported as
    such, never as a proof)."""
    for k in range(1, nf.m):
        if sheet_difference(nf, k, tol).N > 0:
            return "true-branch"
    return "false-candidate"


# ------------------------------------------------------------------ direction report

@dataclass(frozen=True)
class FamilyReport:
    k: int
    N: int
    A: complex
    directions_param: np.ndarray
    image_rays: list
    gap_ratio: float


@dataclass(frozen=True)
class CourantReport:
    m: int
    families: list
    combined_rays: list
    gap_ratio: float
    equal_angles: bool
    tol: float


def _gap_ratio(angles):
    angles = np.sort(np.asarray(angles, dtype=float))
    if len(angles) < 2:
        return 1.0
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
    return float(gaps.max() / gaps.min())


def courant_report(nf, tol=1e-9):
    """Per-family direction data plus the combined equal-angle verdict.

    Within a family the crossing directions are equally spaced by
    construction; the verdict concerns the union of image rays across all
    families, measured by the ratio of the extreme consecutive gaps.
    """
    families = []
    all_rays = []
    for k in range(1, nf.m):
        sd = sheet_difference(nf, k)
        if sd.is_zero:
            continue
        if mirror_pair_residual(nf, k) > 1e-8 * max(sd.series.max_modulus(), 1.0):
            raise NumericalError("mirror-check",
                                 f"families {k} and {nf.m - k} violate the mirror identity")
        rays = sd.image_rays(tol)
        families.append(FamilyReport(
            k=k, N=sd.N, A=sd.A, directions_param=sd.directions_param,
            image_rays=rays, gap_ratio=_gap_ratio([a for a, _ in rays])))
        all_rays.extend(sd.directions_image)
    if not families:
        raise ValidationError("no-leading-term",
                              "all sheet differences vanish to truncation order")
    combined = group_rays(np.asarray(all_rays), tol)
    ratio = _gap_ratio([a for a, _ in combined])
    return CourantReport(m=nf.m, families=families, combined_rays=combined,
                         gap_ratio=ratio, equal_angles=bool(ratio < 1 + tol), tol=tol)


def quartic_reference(data):
    """Closed-form leading data for the degree-3 wrap demonstration family
    h = 4 z^3, g = a z^2 + b z^3, used to annotate reports.  Returns None
    when the surface is not of that form."""
    h, g = data.h, data.g
    if len(h) != 4 or len(g) != 4:
        return None
    if np.max(np.abs(h - np.array([0, 0, 0, 4.0]))) > 1e-12:
        return None
    if abs(g[0]) > 1e-12 or abs(g[1]) > 1e-12:
        return None
    a, b = complex(g[2]), complex(g[3])
    return {"a": a, "b": b,
            "families": {1: {"N": 6, "A": 8 * a / 3}, 2: {"N": 7, "A": 8 * b}}}

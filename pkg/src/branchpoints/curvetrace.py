"""Numerical continuation of self-intersection curves near a branch point.

Curves are traced on the exact surface, not on the truncated series: the
wrap coordinate is inverted by Newton iteration on the exact polynomial
pair, so accepted samples are genuine self-intersections independent of
the truncation order.  The series supply seeds and predictors only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .branchlocal import sheet_difference, zero_directions
from .errors import NumericalError, ValidationError
from .ioutil import atomic_write_text
from .weierstrass import poly_der, poly_val


@dataclass
class TraceConfig:
    r_start: float = 1e-3
    r_max: float = 0.3
    step: float = 4e-3
    newton_tol: float = 1e-12
    residual_tol: float | None = None
    max_steps: int = 4000

    def validate(self):
        if not (0 < self.r_start < self.r_max):
            raise ValidationError("trace-config", "need 0 < r_start < r_max")
        if self.step <= 0 or self.newton_tol <= 0 or self.max_steps < 1:
            raise ValidationError("trace-config", "step, tolerances and max_steps must be positive")
        if self.residual_tol is not None and self.residual_tol <= 0:
            raise ValidationError("trace-config", "residual_tol must be positive")
        return self


@dataclass
class ZeroCurve:
    """Samples of one intersection arc: w in the wrap plane, the two sheet
    parameters z1, z2 (with wrap coordinates w and zeta^k w), their common
    surface point, and the three-coordinate residual |f(z1) - f(z2)|."""

    k: int
    theta_start: float
    w: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    points: np.ndarray
    residuals: np.ndarray
    status: str = "ok"

    def __len__(self):
        return len(self.w)

    def radii(self):
        return np.abs(self.w)


# ------------------------------------------------------------------ exact inversion

def _invert_xi(nf, tau, xi0, rel_tol, max_iter=50):
    """Solve pi_hol(xi) + conj(pi_anti(xi)) = tau by 2x2 real Newton steps.

    Works on arrays.  Convergence is relative to |tau| with a stagnation
    exit on the step size, since |tau| ~ |w|^m is very small near the
    branch point.
    """
    xi = np.asarray(xi0, dtype=complex).copy()
    tau = np.broadcast_to(np.asarray(tau, dtype=complex), xi.shape).copy()
    dh = poly_der(nf.pi_hol)
    da = poly_der(nf.pi_anti)
    floor = np.maximum(np.abs(tau), 1e-300)
    for _ in range(max_iter):
        G = poly_val(nf.pi_hol, xi) + np.conj(poly_val(nf.pi_anti, xi)) - tau
        if not np.all(np.isfinite(G)):
            raise NumericalError("newton-diverged", "inversion iterate left the finite range")
        active = np.abs(G) > rel_tol * floor
        if not np.any(active):
            return xi
        A = poly_val(dh, xi)
        B = np.conj(poly_val(da, xi))
        D = np.abs(A) ** 2 - np.abs(B) ** 2
        bad = ~np.isfinite(D) | (np.abs(D) < 1e-300)
        if np.any(bad & active):
            raise NumericalError("newton-diverged", "degenerate Jacobian during inversion")
        delta = (np.conj(A) * (-G) - B * np.conj(-G)) / np.where(bad, 1.0, D)
        stalled = np.abs(delta) <= 5e-16 * (np.abs(xi) + 1e-30)
        delta = np.where(active & ~stalled, delta, 0.0)
        if not np.any(active & ~stalled):
            return xi
        xi = xi + delta
    G = poly_val(nf.pi_hol, xi) + np.conj(poly_val(nf.pi_anti, xi)) - tau
    if np.any(~np.isfinite(G) | (np.abs(G) > rel_tol * floor * 10)):
        raise NumericalError("newton-diverged",
                             f"inversion residual {np.max(np.abs(G)):g} after {max_iter} iterations")
    return xi


def _series_seed(nf, w):
    """Vectorized evaluation of the truncated inverse series (zero at w = 0)."""
    w = np.asarray(w, dtype=complex)
    keys = nf.z_of_w.support()
    if not keys:
        return np.zeros_like(w)
    ii = np.array([k[0] for k in keys])
    jj = np.array([k[1] for k in keys])
    cc = np.array([nf.z_of_w.terms[k] for k in keys])
    flat = w.ravel()
    out = np.zeros_like(flat)
    nz = flat != 0
    wnz = flat[nz]
    vals = ((wnz[:, None] ** ii[None, :])
            * (np.conj(wnz)[:, None] ** jj[None, :])) @ cc
    out[nz] = vals
    return (out / nf.coord_scale).reshape(w.shape)


def invert_wrap(nf, w, guess_xi=None, rel_tol=1e-12):
    """xi with (p1 + i p2)(xi) = w^m, seeded from the truncated series."""
    w = np.asarray(w, dtype=complex)
    xi0 = _series_seed(nf, w) if guess_xi is None else np.asarray(guess_xi, dtype=complex)
    return _invert_xi(nf, w ** nf.m, xi0, rel_tol)


def z_of_w_numeric(surface, nf, w, guess=None, newton_tol=1e-12):
    """Original-coordinate z solving the wrap equation; guess is a z value."""
    guess_xi = None if guess is None else np.asarray(guess, dtype=complex) - nf.z0
    return nf.z0 + invert_wrap(nf, w, guess_xi, newton_tol)


def _p3(nf, xi):
    return 2 * poly_val(nf.p3_hol, xi).real


def big_phi_exact(surface, nf, k, w, newton_tol=1e-12):
    """Exact height gap p3(z(w)) - p3(z(zeta^k w)) on the surface."""
    w = complex(w)
    zeta = nf.zeta(k)
    xi1 = invert_wrap(nf, w, rel_tol=newton_tol)
    xi2 = invert_wrap(nf, zeta * w, rel_tol=newton_tol)
    return float(_p3(nf, xi1) - _p3(nf, xi2))


# ------------------------------------------------------------------ continuation

class _GapFunction:
    """H(w) = exact sheet gap for one family.

    Every call seeds Newton from the truncated series; seeds carried over
    from a previous w are only safe for small relative moves, while the
    series seed is good anywhere in the working disk.
    """

    def __init__(self, surface, nf, k, newton_tol):
        self.surface = surface
        self.nf = nf
        self.k = k
        self.zeta = nf.zeta(k)
        self.newton_tol = newton_tol

    def __call__(self, w):
        nf = self.nf
        xi1 = invert_wrap(nf, w, rel_tol=self.newton_tol)
        xi2 = invert_wrap(nf, self.zeta * w, rel_tol=self.newton_tol)
        return float(_p3(nf, xi1) - _p3(nf, xi2)), complex(xi1), complex(xi2)

    def gradient(self, w):
        h = 1e-6 * max(abs(w), 1e-4)
        hx1, _, _ = self(w + h)
        hx0, _, _ = self(w - h)
        hy1, _, _ = self(w + 1j * h)
        hy0, _, _ = self(w - 1j * h)
        return complex((hx1 - hx0) / (2 * h), (hy1 - hy0) / (2 * h))


def trace_zero_curve(surface, nf, k, theta_start, cfg=None):
    """Predict-correct continuation of the exact sheet gap's zero level set
    from r_start outward to r_max; every accepted sample is re-checked to be
    a genuine three-coordinate self-intersection."""
    cfg = (cfg or TraceConfig()).validate()
    sd = sheet_difference(nf, k)
    if sd.is_zero:
        raise ValidationError("no-leading-term",
                              "sheet difference vanishes to truncation order; nothing to trace")
    residual_tol = cfg.residual_tol
    if residual_tol is None:
        residual_tol = 1e-9 * max(surface.scale(1.2 * cfg.r_max / nf.coord_scale, nf.z0), 1e-6)

    gap = _GapFunction(surface, nf, k, cfg.newton_tol)
    amp = abs(sd.A)

    def corrector_tol(w):
        return min(1e-11 * amp * max(abs(w), cfg.r_start) ** sd.N, 0.05 * residual_tol)

    def correct(w, max_iter=12):
        for _ in range(max_iter):
            H, _, _ = gap(w)
            if abs(H) <= corrector_tol(w):
                return w
            g = gap.gradient(w)
            if abs(g) < 1e-300:
                return None
            w = w - H * g / abs(g) ** 2
        H, _, _ = gap(w)
        return w if abs(H) <= corrector_tol(w) else None

    samples = []

    def accept(w):
        H, xi1, xi2 = gap(w)
        p1 = surface.point(np.asarray(nf.z0 + xi1))
        p2 = surface.point(np.asarray(nf.z0 + xi2))
        res = float(np.linalg.norm(p1 - p2))
        if not np.isfinite(res) or res >= residual_tol:
            return False
        samples.append((complex(w), nf.z0 + xi1, nf.z0 + xi2, p1, res))
        return True

    status = "ok"
    w = correct(cfg.r_start * cmath.exp(1j * theta_start))
    if w is None or not accept(w):
        raise NumericalError("trace-lost", "could not correct the starting point onto the curve")

    direction = cmath.exp(1j * theta_start)
    for _ in range(cfg.max_steps):
        g = gap.gradient(w)
        tangent = 1j * g / abs(g)
        if (tangent.real * direction.real + tangent.imag * direction.imag) < 0:
            tangent = -tangent
        step = cfg.step
        crossing = False
        if abs(w + step * tangent) >= cfg.r_max:
            # land the final sample on the r_max circle
            lo, hi = 0.0, step
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if abs(w + mid * tangent) >= cfg.r_max:
                    hi = mid
                else:
                    lo = mid
            step = hi
            crossing = True
        try:
            w_next = correct(w + step * tangent)
            ok = w_next is not None and accept(w_next)
        except NumericalError:
            ok = False
        if not ok:
            status = "trace-lost"
            break
        direction = (w_next - w) / abs(w_next - w)
        w = w_next
        if crossing or abs(w) >= cfg.r_max - 1e-12:
            break
    else:
        status = "trace-lost"

    ws, z1s, z2s, pts, res = zip(*samples)
    return ZeroCurve(k=k, theta_start=float(theta_start % (2 * math.pi)),
                     w=np.array(ws), z1=np.array(z1s), z2=np.array(z2s),
                     points=np.array(pts), residuals=np.array(res), status=status)


def trace_family(surface, nf, k, cfg=None):
    """One curve per zero direction of family k."""
    sd = sheet_difference(nf, k)
    if sd.is_zero:
        raise ValidationError("no-leading-term",
                              "sheet difference vanishes to truncation order; nothing to trace")
    return [trace_zero_curve(surface, nf, k, theta, cfg) for theta in sd.directions_param]


def tangent_angle_at_origin(curve, r_limit=None):
    """Limit angle of the curve at the branch point.

    Fits arg(w) against radius over the innermost samples and extrapolates
    to r -> 0 (Richardson-style: the quadratic fit removes the linear and
    quadratic radius terms of the angle drift).
    """
    radii = curve.radii()
    if r_limit is None:
        r_limit = radii.max() / 4
    mask = radii < r_limit
    rs = radii[mask]
    if len(np.unique(np.round(rs, 14))) < 4:
        raise ValidationError("insufficient-samples",
                              "need samples at >= 4 distinct radii below the fit window")
    angles = np.unwrap(np.angle(curve.w[mask]))
    deg = 2 if len(rs) >= 6 else 1
    coeffs = np.polyfit(rs, angles, deg)
    return float(np.mod(coeffs[-1], 2 * np.pi))


def write_curves_csv(curves, path):
    lines = ["k,theta_start,w_re,w_im,z1_re,z1_im,z2_re,z2_im,f1,f2,f3,residual"]
    for c in curves:
        for i in range(len(c)):
            p = c.points[i]
            lines.append(
                f"{c.k},{c.theta_start:.12g},{c.w[i].real:.12g},{c.w[i].imag:.12g},"
                f"{c.z1[i].real:.12g},{c.z1[i].imag:.12g},"
                f"{c.z2[i].real:.12g},{c.z2[i].imag:.12g},"
                f"{p[0]:.12g},{p[1]:.12g},{p[2]:.12g},{c.residuals[i]:.6g}")
    text = "\n".join(lines) + "\n"
    atomic_write_text(path, text)
    return text

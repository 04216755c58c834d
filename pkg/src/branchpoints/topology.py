"""Euler characteristic bookkeeping for branched coverings of surfaces.

Surfaces are encoded by (orientable, demigenus, boundary count) only; the
demigenus r gives chi = 2 - r for closed surfaces, extended to boundaries
by chi = 2 - r - b (an artifact convention, flagged in reports).  The
covering relation used throughout is

    chi(cover) = d * chi(quotient) - total branching order.

Orientability parity (a covering quotient of a nonorientable surface is
nonorientable, and conversely) is applied as a rule, not re-derived.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class SurfaceType:
    orientable: bool
    r: int
    b: int = 0

    def __post_init__(self):
        if self.r < 0 or self.b < 0:
            raise ValidationError("surface-type", "demigenus and boundary count must be >= 0")
        if self.orientable and self.r % 2 != 0:
            raise ValidationError("surface-type",
                                  "orientable surfaces have even demigenus")

    @classmethod
    def sphere(cls):
        return cls(True, 0)

    @classmethod
    def projective_plane(cls):
        return cls(False, 1)

    @classmethod
    def torus(cls):
        return cls(True, 2)

    @classmethod
    def klein_bottle(cls):
        return cls(False, 2)

    @classmethod
    def orientable_genus(cls, genus, b=0):
        return cls(True, 2 * genus, b)

    @classmethod
    def nonorientable(cls, r, b=0):
        return cls(False, r, b)

    def name(self):
        closed = {(True, 0): "sphere", (False, 1): "projective-plane",
                  (True, 2): "torus", (False, 2): "klein-bottle"}
        base = closed.get((self.orientable, self.r))
        if base is None:
            kind = "orientable" if self.orientable else "nonorientable"
            base = f"{kind} demigenus-{self.r}"
        return base if self.b == 0 else f"{base} with {self.b} boundary components"


@dataclass(frozen=True)
class CoveringSpec:
    d: int
    O: int

    def __post_init__(self):
        if self.d < 1 or self.O < 0:
            raise ValidationError("covering-spec", "need degree >= 1 and branching order >= 0")


def euler_char(surface):
    return 2 - surface.r - surface.b


def rh_branching(base, cover, d):
    """Total branching order of a degree-d branched covering cover -> base,
    from chi(cover) = d chi(base) - O."""
    if d < 1:
        raise ValidationError("covering-spec", "degree must be >= 1")
    if base.b != 0 or cover.b != 0:
        raise ValidationError("covering-spec", "covering arithmetic is for closed surfaces")
    O = d * euler_char(base) - euler_char(cover)
    if O < 0:
        raise ValidationError("rh-infeasible",
                              f"no branched covering: requires branching order {O} < 0")
    return O


@dataclass(frozen=True)
class QuotientOption:
    quotient: SurfaceType
    d_min: int
    d_max: int | None  # None = unbounded

    def branching_at(self, sigma, d):
        return rh_branching(self.quotient, sigma, d)


def admissible_quotients(sigma, require_d_min=2, require_O_min=1,
                         parity_rule=True, r_cap=None):
    """Quotient types admitting a branched covering from sigma with degree
    >= require_d_min and branching order >= require_O_min.

    Candidates run over demigenus 0..r(sigma)+2 by default; feasibility is
    monotone in the demigenus (chi decreases), so the cap is safe and is
    re-checkable by raising r_cap.
    """
    if sigma.b != 0:
        raise ValidationError("covering-spec", "quotient enumeration is for closed surfaces")
    if require_d_min < 2 or require_O_min < 1:
        raise ValidationError("covering-spec",
                              "the ramified enumeration needs degree >= 2 and branching >= 1")
    chi = euler_char(sigma)
    cap = sigma.r + 2 if r_cap is None else r_cap
    candidates = []
    for r in range(cap + 1):
        if parity_rule:
            if sigma.orientable and r % 2 == 0:
                candidates.append(SurfaceType(True, r))
            elif not sigma.orientable and r >= 1:
                candidates.append(SurfaceType(False, r))
        else:
            if r % 2 == 0:
                candidates.append(SurfaceType(True, r))
            if r >= 1:
                candidates.append(SurfaceType(False, r))

    options = []
    for q in candidates:
        chi_q = euler_char(q)
        if chi_q > 0:
            # O(d) = d chi_q - chi is increasing in d
            d_lo = max(require_d_min, -(-(chi + require_O_min) // chi_q))
            options.append(QuotientOption(q, d_lo, None))
        elif chi_q == 0:
            if -chi >= require_O_min:
                options.append(QuotientOption(q, require_d_min, None))
        else:
            # O decreasing in d: feasible while d <= (chi + O_min)/chi_q
            d_hi = (chi + require_O_min) // chi_q
            if d_hi >= require_d_min:
                options.append(QuotientOption(q, require_d_min, d_hi))
    return options


@dataclass(frozen=True)
class MinimalityCertificate:
    applicable: bool
    verdict: str
    quotients: list
    degree: int | None
    branching_order: int | None
    area_factor: int | None
    notes: list

    def to_dict(self):
        return {
            "applicable": self.applicable,
            "verdict": self.verdict,
            "quotients": [{"type": opt.quotient.name(),
                           "degree_min": opt.d_min,
                           "degree_max": opt.d_max} for opt in self.quotients],
            "degree": self.degree,
            "branching_order": self.branching_order,
            "area_factor": self.area_factor,
            "notes": list(self.notes),
        }

    def to_text(self):
        lines = [f"verdict: {self.verdict}"]
        if self.applicable:
            for opt in self.quotients:
                hi = "inf" if opt.d_max is None else str(opt.d_max)
                lines.append(f"admissible quotient: {opt.quotient.name()} "
                             f"(degree {opt.d_min}..{hi})")
            lines.append(f"minimal degree: {self.degree}")
            lines.append(f"branching order at minimal degree: {self.branching_order}")
            lines.append(f"area reduction factor: {self.area_factor}")
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def minimality_certificate(sigma, require_O_min=1):
    """Certificate that a ramified area minimizer of projective-plane type is
    impossible: any ramified factorization passes through a projective-plane
    quotient of degree >= 2, halving the area, while homotopy nontriviality
    survives the factorization."""
    if sigma != SurfaceType.projective_plane():
        return MinimalityCertificate(
            applicable=False, verdict="not-applicable", quotients=[],
            degree=None, branching_order=None, area_factor=None,
            notes=[f"certificate is specific to the projective plane, got {sigma.name()}"])

    notes = []
    if require_O_min < 1:
        notes.append("unbranched self-quotients need d * chi(quotient) = 1, "
                     "forcing degree 1: no area reduction without branching")
        require_O_min = 1
    quotients = admissible_quotients(sigma, 2, require_O_min)
    d = min(opt.d_min for opt in quotients)
    O = rh_branching(quotients[0].quotient, sigma, d)
    notes.append("a quotient map of degree d multiplies area by 1/d, so the "
                 f"quotient surface has at most 1/{d} of the original area")
    notes.append("a factorization through the quotient preserves homotopy "
                 "nontriviality: if the quotient map were null-homotopic the "
                 "composite would be too")
    notes.append("boundary convention chi = 2 - r - b is an artifact extension; "
                 "all certificate arithmetic here is for closed surfaces")
    return MinimalityCertificate(
        applicable=True, verdict="ramified minimizer impossible",
        quotients=quotients, degree=d, branching_order=O, area_factor=d,
        notes=notes)

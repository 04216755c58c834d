"""Truncated bivariate series in a complex parameter and its conjugate.

This is the algebra behind every local expansion in the package.  A series
is a sparse table of terms ``c * w**i * conj(w)**j`` graded by the total
order ``i + j``; every term with ``i + j > trunc`` is dropped and treated
as *unknown*, not as zero.  Exponents may be negative (Laurent-type keys
such as ``w**-3 * conj(w)**8`` appear when an m-th power is inverted), and
the grading is always the plain sum ``i + j``.

Instances are immutable: every operation returns a new series, so values
may be shared freely between threads.
"""

from __future__ import annotations

import math

from .errors import NumericalError, ValidationError

# Coefficients below this modulus are purged after every operation.  Sits
# 10x under the 1e-12 tolerance the exact-structure checks run at, which
# keeps tables sparse without eating legitimate terms at desk scale.
PURGE_TOL = 1e-13


def _grade_key(key):
    i, j = key
    return (i + j, i, j)


class BiSeries:
    """Sparse truncated series in ``(w, conj(w))`` with complex coefficients."""

    __slots__ = ("terms", "trunc")

    def __init__(self, terms, trunc):
        if not isinstance(trunc, int) or trunc < 1:
            raise ValidationError("trunc-invalid",
                                  f"truncation order must be an integer >= 1, got {trunc!r}")
        table = {}
        for (i, j), raw in terms.items():
            c = complex(raw)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValidationError("non-finite", f"coefficient at ({i},{j}) is not finite")
            if i + j > trunc or abs(c) <= PURGE_TOL:
                continue
            table[(int(i), int(j))] = c
        self.terms = table
        self.trunc = trunc

    # ---------------------------------------------------------------- constructors

    @classmethod
    def zero(cls, trunc):
        return cls({}, trunc)

    @classmethod
    def monomial(cls, coeff, i, j, trunc):
        return cls({(i, j): coeff}, trunc)

    @classmethod
    def variable(cls, trunc):
        """The identity series w."""
        return cls({(1, 0): 1.0}, trunc)

    @classmethod
    def from_holomorphic(cls, coeffs, trunc, antiholomorphic=False):
        """Series sum_k coeffs[k] * w**k (or conj(w)**k)."""
        terms = {}
        for k, c in enumerate(coeffs):
            key = (0, k) if antiholomorphic else (k, 0)
            terms[key] = terms.get(key, 0.0) + complex(c)
        return cls(terms, trunc)

    # ---------------------------------------------------------------- inspection

    def coeff(self, i, j):
        return self.terms.get((i, j), 0j)

    def min_order(self):
        """Smallest total order with a stored term, or None when empty."""
        if not self.terms:
            return None
        return min(i + j for (i, j) in self.terms)

    def terms_at_order(self, order):
        return {k: c for k, c in self.terms.items() if k[0] + k[1] == order}

    def max_modulus(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def has_negative_exponent(self):
        return any(i < 0 or j < 0 for (i, j) in self.terms)

    def support(self):
        return sorted(self.terms, key=_grade_key)

    def allclose(self, other, tol=1e-12):
        keys = set(self.terms) | set(other.terms)
        scale = max(self.max_modulus(), other.max_modulus(), 1.0)
        return all(abs(self.coeff(*k) - other.coeff(*k)) <= tol * scale for k in keys)

    def render(self):
        """Debug rendering, one 'coeff_re,coeff_im,i,j' line per term,
        ascending by (total order, i).  Used by the golden-file tests."""
        lines = []
        for (i, j) in self.support():
            c = self.terms[(i, j)]
            lines.append(f"{c.real:.17g},{c.imag:.17g},{i},{j}")
        return "\n".join(lines)

    def __repr__(self):
        inner = ", ".join(f"({i},{j}): {self.terms[(i, j)]:.6g}" for (i, j) in self.support())
        return f"BiSeries(T={self.trunc}, {{{inner}}})"

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self):
        return hash((self.trunc, tuple(sorted(self.terms.items(), key=lambda kv: _grade_key(kv[0])))))

    # ---------------------------------------------------------------- ring arithmetic

    def _check_compatible(self, other):
        if self.trunc != other.trunc:
            raise ValidationError("trunc-mismatch",
                                  f"truncation orders differ: {self.trunc} vs {other.trunc}")

    def _coerce(self, other):
        if isinstance(other, BiSeries):
            self._check_compatible(other)
            return other
        return BiSeries.monomial(other, 0, 0, self.trunc)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0.0) + c
        return BiSeries(terms, self.trunc)

    __radd__ = __add__

    def __neg__(self):
        return BiSeries({k: -c for k, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BiSeries):
            return BiSeries({k: c * other for k, c in self.terms.items()}, self.trunc)
        self._check_compatible(other)
        T = self.trunc
        terms = {}
        for (i1, j1) in self.support():
            c1 = self.terms[(i1, j1)]
            for (i2, j2) in other.support():
                i, j = i1 + i2, j1 + j2
                if i + j > T:
                    continue
                terms[(i, j)] = terms.get((i, j), 0.0) + c1 * other.terms[(i2, j2)]
        return BiSeries(terms, T)

    __rmul__ = __mul__

    # ---------------------------------------------------------------- bar operator

    def conjugate(self):
        """Swap keys (i,j) -> (j,i) and conjugate the coefficients."""
        return BiSeries({(j, i): c.conjugate() for (i, j), c in self.terms.items()}, self.trunc)

    def real_part(self):
        """(s + conj(s)) / 2; output is self-conjugate."""
        return (self + self.conjugate()) * 0.5

    # ---------------------------------------------------------------- composition

    def _shifted(self, di, dj, divisor=1.0):
        return BiSeries({(i + di, j + dj): c / divisor for (i, j), c in self.terms.items()},
                        self.trunc)

    def _monomial_inverse(self, code):
        """Reciprocal series, valid when the lowest-order part is one monomial.

        Factors the leading monomial and expands the remaining (1+u)**-1 as a
        geometric series within the truncation grade.
        """
        lead = self.min_order()
        if lead is None:
            raise ValidationError(code, "cannot invert the zero series")
        low = self.terms_at_order(lead)
        if len(low) != 1:
            raise ValidationError(code, "leading part is not a single monomial")
        ((p, q), c), = low.items()
        u = self._shifted(-p, -q, divisor=c) - 1.0
        geom = BiSeries.monomial(1.0, 0, 0, self.trunc)
        upow = geom
        for _ in range(self.trunc):
            upow = upow * (-u)
            if not upow.terms:
                break
            geom = geom + upow
        return geom._shifted(-p, -q, divisor=c)

    def compose(self, inner):
        """Substitute w := inner and conj(w) := conj(inner) into self.

        ``inner`` must have no constant term.  Negative exponents of the
        outer series require ``inner`` to have a single-monomial leading
        part so its reciprocal expands as a geometric series.

        Power chains are computed at an elevated working grade: a term of
        inner**j above the nominal truncation can re-enter range once it
        meets a negative-total-order partner from inner**i, so each side
        carries headroom for the most negative exponent on the other side.
        Exact to the truncation grade for outer series of total order >= 0.
        """
        self._check_compatible(inner)
        if (0, 0) in inner.terms:
            raise ValidationError("compose-constant-term",
                                  "inner series has a constant term")
        T = self.trunc
        reserve = max((max(0, -i) + max(0, -j) for (i, j) in self.terms), default=0)
        Tw = T + reserve
        inner_w = BiSeries(inner.terms, Tw)
        inner_conj = inner_w.conjugate()
        needs_inverse = any(i < 0 or j < 0 for (i, j) in self.terms)
        inv = inv_conj = None
        if needs_inverse:
            inv = inner_w._monomial_inverse("compose-negative-power")
            inv_conj = inv.conjugate()

        one = BiSeries.monomial(1.0, 0, 0, Tw)
        cache = {}

        def power(tag, base, n):
            if n == 0:
                return one
            key = (tag, n)
            if key not in cache:
                cache[key] = power(tag, base, n - 1) * base
            return cache[key]

        acc = {}
        for (i, j) in self.support():
            c = self.terms[(i, j)]
            fi = power("z", inner_w, i) if i >= 0 else power("zinv", inv, -i)
            fj = power("zb", inner_conj, j) if j >= 0 else power("zbinv", inv_conj, -j)
            for key, value in (fi * fj).terms.items():
                if key[0] + key[1] <= T:
                    acc[key] = acc.get(key, 0.0) + c * value
        return BiSeries(acc, T)

    # ---------------------------------------------------------------- roots and reversion

    def mth_root(self, m):
        """Principal m-th root of a series whose lowest-order part is c*w**m.

        Factors c*w**m and expands (1+u)**(1/m) by the binomial series; the
        root of c is the principal complex root.
        """
        if not isinstance(m, int) or m < 1:
            raise ValidationError("root-order", f"root order must be a positive integer, got {m!r}")
        lead = self.min_order()
        low = self.terms_at_order(lead) if lead is not None else {}
        if len(low) != 1 or (m, 0) not in low:
            raise ValidationError("root-leading-form",
                                  f"lowest-order part must be a single c*w**{m} monomial")
        c = low[(m, 0)]
        u = self._shifted(-m, 0, divisor=c) - 1.0
        acc = BiSeries.monomial(1.0, 0, 0, self.trunc)
        upow = acc
        binom = 1.0
        for n in range(1, self.trunc + 1):
            upow = upow * u
            if not upow.terms:
                break
            binom *= (1.0 / m - (n - 1)) / n
            acc = acc + upow * binom
        return acc * BiSeries.monomial(c ** (1.0 / m), 1, 0, self.trunc)

    def revert(self):
        """Compositional inverse of a series of the form w + (order >= 2).

        Fixed-point iteration Z <- w - (self - w) o Z, the conjugate series
        updated jointly through compose; one grade stabilizes per pass.
        """
        lead = self.coeff(1, 0)
        if abs(lead - 1.0) > 1e-12 or any(
                i + j <= 1 and (i, j) != (1, 0) for (i, j) in self.terms):
            raise ValidationError("revert-leading",
                                  "series must be w plus terms of total order >= 2")
        w = BiSeries.variable(self.trunc)
        tail = self - w
        if not tail.terms:
            return w
        z = w
        for _ in range(self.trunc + 1):
            z_next = w - tail.compose(z)
            if z_next.allclose(z, tol=1e-14):
                return z_next
            z = z_next
        raise NumericalError("revert-diverged",
                             f"reversion not stable after {self.trunc + 1} passes")

    # ---------------------------------------------------------------- evaluation

    def evaluate(self, w):
        """Sum coeff * w**i * conj(w)**j over the stored terms."""
        w = complex(w)
        if w == 0:
            if self.has_negative_exponent():
                raise ValidationError("evaluate-pole",
                                      "series has negative exponents; undefined at w = 0")
            return self.terms.get((0, 0), 0j)
        wb = w.conjugate()
        total = 0j
        for (i, j) in self.support():
            total += self.terms[(i, j)] * w ** i * wb ** j
        return total

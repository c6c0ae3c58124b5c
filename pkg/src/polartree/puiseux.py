"""Truncated fractional power series and the basic order/contact operations.

A series is a finite, strictly increasing list of ``(exponent, coefficient)``
terms with exact field coefficients, plus a truncation level: every exponent
below ``trunc`` is exact, and nothing is known at or beyond it.  ``trunc`` is
either a Fraction or :data:`INF`.  Truncation bookkeeping is pessimistic on
purpose - an operation refuses to report an order that unknown tail terms
could still change.

Arcs (inputs to the tree machinery) have non-negative exponents; differences
and substituted values may carry negative exponents in Laurent contexts.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from .errors import FieldTooSmall, Indeterminate, TruncationTooShort
from .exactalg import BiPoly, CycloField, CycloRational, UniPoly


class _Infinity:
    """Order/truncation value larger than every Fraction."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __gt__(self, other):
        return not isinstance(other, _Infinity)

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _Infinity)

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __hash__(self):
        return hash("polartree-infinity")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "INF"


INF = _Infinity()

Exponent = Fraction  # non-negative rational; denominator divides the session bound


def exp_min(a, b):
    return b if a > b else a


class PuiseuxSeries:
    """Truncated fractional power series in y over Q(zeta_N)."""

    __slots__ = ("field", "terms", "trunc")

    def __init__(
        self,
        field: CycloField,
        terms: Iterable[tuple[Fraction, CycloRational]] = (),
        trunc=INF,
    ):
        clean: list[tuple[Fraction, CycloRational]] = []
        last = None
        for e, c in terms:
            e = Fraction(e)
            if not isinstance(c, CycloRational):
                c = field.rational(c)
            if c.is_zero():
                continue
            if last is not None and e <= last:
                raise ValueError("term exponents must be strictly increasing")
            if not (e < trunc):
                continue
            clean.append((e, c))
            last = e
        self.field = field
        self.terms = tuple(clean)
        self.trunc = trunc

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, field: CycloField) -> "PuiseuxSeries":
        return cls(field, (), INF)

    @classmethod
    def monomial(cls, field: CycloField, exp, coeff=1) -> "PuiseuxSeries":
        return cls(field, [(Fraction(exp), coeff)], INF)

    # -- basic structure ----------------------------------------------------
    def is_certified_zero(self) -> bool:
        return not self.terms and self.trunc is INF

    def order(self):
        """The y-order: smallest exponent, INF for the exact zero series.

        Raises :class:`Indeterminate` when the series is zero up to a finite
        truncation (the order could be anything at or beyond it).
        """
        if self.terms:
            return self.terms[0][0]
        if self.trunc is INF:
            return INF
        raise Indeterminate(f"order unresolved: zero up to O(y^{self.trunc})")

    def order_lower_bound(self):
        return self.terms[0][0] if self.terms else self.trunc

    def leading_coefficient(self) -> CycloRational:
        if not self.terms:
            raise Indeterminate("no leading term")
        return self.terms[0][1]

    def coefficient_at(self, e) -> CycloRational:
        e = Fraction(e)
        if not (e < self.trunc):
            raise Indeterminate(f"coefficient at y^{e} not determined (trunc {self.trunc})")
        for te, tc in self.terms:
            if te == e:
                return tc
            if te > e:
                break
        return self.field.zero

    def prefix_below(self, h) -> "PuiseuxSeries":
        """The exact sub-series of terms with exponent < h."""
        if not (h <= self.trunc):
            raise Indeterminate(f"prefix below y^{h} not determined (trunc {self.trunc})")
        return PuiseuxSeries(self.field, [(e, c) for e, c in self.terms if e < h], INF)

    def truncate_to(self, t) -> "PuiseuxSeries":
        return PuiseuxSeries(self.field, self.terms, exp_min(self.trunc, t))

    def exponent_denominator(self) -> int:
        d = 1
        for e, _ in self.terms:
            d = d * e.denominator // math.gcd(d, e.denominator)
        return d

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        trunc = exp_min(self.trunc, other.trunc)
        merged: dict[Fraction, CycloRational] = {}
        for e, c in self.terms:
            merged[e] = c
        for e, c in other.terms:
            s = merged.get(e)
            merged[e] = c if s is None else s + c
        items = sorted((e, c) for e, c in merged.items() if not c.is_zero())
        return PuiseuxSeries(self.field, items, trunc)

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(self.field, [(e, -c) for e, c in self.terms], self.trunc)

    def __sub__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return self + (-other)

    def scale(self, c) -> "PuiseuxSeries":
        if not isinstance(c, CycloRational):
            c = self.field.rational(c)
        if c.is_zero():
            return PuiseuxSeries.zero(self.field)
        return PuiseuxSeries(self.field, [(e, tc * c) for e, tc in self.terms], self.trunc)

    def shift(self, e) -> "PuiseuxSeries":
        """Multiply by y^e."""
        e = Fraction(e)
        t = self.trunc if self.trunc is INF else self.trunc + e
        return PuiseuxSeries(self.field, [(te + e, c) for te, c in self.terms], t)

    def __mul__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        if not self.terms and self.trunc is INF:
            return self
        if not other.terms and other.trunc is INF:
            return other
        ta = INF if self.trunc is INF else self.trunc + other.order_lower_bound()
        tb = INF if other.trunc is INF else other.trunc + self.order_lower_bound()
        trunc = exp_min(ta, tb)
        acc: dict[Fraction, CycloRational] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if not (e < trunc):
                    continue
                prod = c1 * c2
                s = acc.get(e)
                acc[e] = prod if s is None else s + prod
        items = sorted((e, c) for e, c in acc.items() if not c.is_zero())
        return PuiseuxSeries(self.field, items, trunc)

    def __pow__(self, n: int) -> "PuiseuxSeries":
        if n < 0:
            raise ValueError("negative power of a series")
        out = PuiseuxSeries(self.field, [(Fraction(0), self.field.one)], INF)
        base = self
        while n:
            if n & 1:
                out = out * base
            if n > 1:
                base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.terms == other.terms and self.trunc == other.trunc

    def __hash__(self) -> int:
        return hash((self.terms, self.trunc))

    # -- rendering ----------------------------------------------------------------
    def __str__(self) -> str:
        parts = []
        for e, c in self.terms:
            cs = str(c)
            if e == 0:
                parts.append(cs if "+" not in cs[1:] and " " not in cs else f"({cs})")
                continue
            mono = "y" if e == 1 else (f"y^{e}" if e.denominator == 1 else f"y^({e})")
            if cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append(f"-{mono}")
            elif ("+" in cs[1:]) or ("-" in cs[1:]) or " " in cs:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        if not parts:
            body = "0"
        else:
            body = parts[0]
            for p in parts[1:]:
                body += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        if self.trunc is INF:
            return body
        t = self.trunc
        ts = f"y^{t}" if t.denominator == 1 else f"y^({t})"
        return f"{body} + O({ts})" if body != "0" else f"O({ts})"

    def __repr__(self) -> str:
        return f"PuiseuxSeries({self})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def contact_order(a: PuiseuxSeries, b: PuiseuxSeries):
    """O(a, b): the y-order of a - b; INF when both are exactly equal."""
    diff = a - b
    if diff.terms:
        return diff.terms[0][0]
    if diff.trunc is INF:
        return INF
    raise Indeterminate(
        f"contact order unresolved: series agree up to O(y^{diff.trunc})"
    )


def substitute_arc(F: BiPoly, xi: PuiseuxSeries) -> PuiseuxSeries:
    """F(xi(y), y) as a series, with honest truncation propagation."""
    rows: dict[int, PuiseuxSeries] = {}
    for (i, j), c in F.terms.items():
        row = rows.get(i)
        term = PuiseuxSeries(xi.field, [(Fraction(j), c)], INF)
        rows[i] = term if row is None else row + term
    if not rows:
        return PuiseuxSeries.zero(xi.field)
    acc = PuiseuxSeries.zero(xi.field)
    for i in range(max(rows), -1, -1):
        acc = acc * xi
        if i in rows:
            acc = acc + rows[i]
    return acc


def order_along_arc(F: BiPoly, xi: PuiseuxSeries):
    """The exact y-order of F(xi(y), y); INF when xi is an exact root.

    Raises :class:`TruncationTooShort` when unknown tail terms of xi could
    cancel the would-be leading term.
    """
    val = substitute_arc(F, xi)
    if val.terms:
        return val.terms[0][0]
    if val.trunc is INF:
        return INF
    raise TruncationTooShort(
        f"order of substituted series hidden beyond O(y^{val.trunc})"
    )


def conjugate_series(a: PuiseuxSeries, k: int, ram: int) -> PuiseuxSeries:
    """Apply the conjugation y^(1/ram) -> zeta_ram^k * y^(1/ram).

    Every term c*y^(n/ram) maps to c*theta^n*y^(n/ram) with theta a primitive
    ram-th root of unity.  Contact orders are preserved pairwise.
    """
    if ram < 1:
        raise ValueError("ramification bound must be positive")
    k %= ram
    theta = a.field.zeta_of_order(ram)  # FieldTooSmall if absent
    if k == 0:
        return a
    out = []
    for e, c in a.terms:
        n = e * ram
        if n.denominator != 1:
            raise FieldTooSmall(
                f"exponent {e} has denominator not dividing the bound {ram}"
            )
        out.append((e, c * theta ** (int(n) * k)))
    return PuiseuxSeries(a.field, out, a.trunc)


# -- generic-arc orders (symbolic coefficient) -------------------------------


def generic_arc_order(
    F: BiPoly, prefix: PuiseuxSeries, h: Fraction
) -> tuple[Fraction, UniPoly]:
    """Order of F(prefix(y) + z*y^h, y) for generic z, with certificate.

    The prefix must be exact (infinite truncation).  Returns the y-order and
    the leading-coefficient polynomial in z; the order is attained exactly at
    those z where the certificate does not vanish.
    """
    if prefix.trunc is not INF:
        raise Indeterminate("generic-arc order needs an exact prefix")
    field = F.field
    zvar = UniPoly(field, (field.zero, field.one), "z")

    # y-exponent -> UniPoly-in-z coefficient, built by Horner in x
    def mul_arc(acc: dict[Fraction, UniPoly]) -> dict[Fraction, UniPoly]:
        out: dict[Fraction, UniPoly] = {}
        for e, poly in acc.items():
            for pe, pc in prefix.terms:
                k = e + pe
                add = poly * pc
                out[k] = out[k] + add if k in out else add
            k = e + h
            add = poly * zvar
            out[k] = out[k] + add if k in out else add
        return {k: v for k, v in out.items() if not v.is_zero()}

    rows: dict[int, dict[Fraction, UniPoly]] = {}
    for (i, j), c in F.terms.items():
        row = rows.setdefault(i, {})
        key = Fraction(j)
        add = UniPoly.constant(field, c, "z")
        row[key] = row[key] + add if key in row else add
    acc: dict[Fraction, UniPoly] = {}
    for i in range(max(rows, default=0), -1, -1):
        acc = mul_arc(acc) if acc else {}
        if i in rows:
            for k, v in rows[i].items():
                acc[k] = acc[k] + v if k in acc else v
            acc = {k: v for k, v in acc.items() if not v.is_zero()}
    if not acc:
        raise ValueError("polynomial is zero along every arc (zero polynomial)")
    e = min(acc)
    return e, acc[e]


def truncate_relative(xi: PuiseuxSeries, tree) -> PuiseuxSeries:
    """Cut an arc at the bar where it leaves the tree: lambda_B + a*y^h(B).

    Roots of the modelled pair are returned unchanged.  Raises
    :class:`Indeterminate` when the arc's truncation does not reach its
    leave height, and :class:`ValueError` for arcs that separate strictly
    between bar heights (those have no bar-relative truncation).
    """
    for info in tree.roots.values():
        if info.series == xi:
            return xi
    trace = tree.trace_arc(xi)
    if trace.is_root:
        return xi
    if trace.leave_bar_id is None:
        raise ValueError("arc separates between bar heights; no relative truncation")
    bar = tree.bars[trace.leave_bar_id]
    coeff = trace.leave_coefficient
    base = bar.prefix
    if coeff is None:
        raise Indeterminate("leave coefficient not determined in the working field")
    return base + PuiseuxSeries(xi.field, [(bar.height, coeff)], INF)

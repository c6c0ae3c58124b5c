"""Newton-Puiseux expansion of the roots x = lambda(y) of a bivariate polynomial.

The engine walks the classical Newton-polygon iteration: pick an edge of
positive slope m, solve the edge polynomial for the leading coefficient c,
substitute x = y^m (c + x') and repeat.  All coefficient arithmetic happens
in Q(zeta_N); when an edge polynomial has no root there, the solver either
raises (strict mode) or records the branch bundle as an unresolved group
whose count and prefix stay exact (count mode).  Multiplicities are made
exact by splitting the input into squarefree-in-x components first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    NeedsLargerField,
    TruncationBudgetExceeded,
    UnresolvedBranch,
    ZeroPolynomial,
    InternalInconsistency,
)
from .exactalg import BiPoly, CycloField, CycloRational, UniPoly, poly_gcd, roots_in_field
from .puiseux import INF, PuiseuxSeries

# internal working form: (x_exponent, y_exponent as Fraction) -> coefficient
_RamTerms = dict[tuple[int, Fraction], CycloRational]


# ---------------------------------------------------------------------------
# Newton polygon
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonEdge:
    top: tuple[int, Fraction]      # endpoint with smaller x-degree, larger y-order
    bottom: tuple[int, Fraction]   # endpoint with larger x-degree
    slope: Fraction                # root order carried by this edge
    extent: int                    # number of roots (with multiplicity) on it


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the support, oriented for positive-order roots."""

    vertices: tuple[tuple[int, Fraction], ...]   # listed by decreasing x-degree
    edges: tuple[PolygonEdge, ...]               # sorted by increasing slope


def _lower_hull(points: Iterable[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    byi: dict[int, Fraction] = {}
    for i, j in points:
        cur = byi.get(i)
        if cur is None or j < cur:
            byi[i] = j
    pts = sorted(byi.items())

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    hull: list[tuple[int, Fraction]] = []
    for p in pts:
        while len(hull) >= 2 and cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _polygon_data(terms: _RamTerms) -> NewtonPolygon:
    hull = _lower_hull(terms.keys())
    edges = []
    for (i1, j1), (i2, j2) in zip(hull, hull[1:]):
        slope = Fraction(j1 - j2, i2 - i1)
        edges.append(PolygonEdge((i1, j1), (i2, j2), slope, i2 - i1))
    edges = [e for e in edges if e.slope > 0]
    return NewtonPolygon(tuple(reversed(hull)), tuple(sorted(edges, key=lambda e: e.slope)))


def newton_polygon(F: BiPoly) -> NewtonPolygon:
    """The Newton polygon of a bivariate polynomial."""
    if F.is_zero():
        raise ZeroPolynomial("zero polynomial has no Newton polygon")
    return _polygon_data({(i, Fraction(j)): c for (i, j), c in F.terms.items()})


def _edge_poly(terms: _RamTerms, edge: PolygonEdge, field: CycloField) -> UniPoly:
    """The edge polynomial E(z) = sum of coefficients on the edge times z^(i-i_min)."""
    (i1, j1) = edge.top
    m = edge.slope
    coeffs = [field.zero] * (edge.extent + 1)
    for (i, j), c in terms.items():
        if i1 <= i <= edge.bottom[0] and j == j1 - m * (i - i1):
            coeffs[i - i1] = coeffs[i - i1] + c
    return UniPoly(field, coeffs, "z")


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpandedRoot:
    """One (bundle of) expanded Newton-Puiseux root(s).

    ``branches`` > 1 means several distinct roots share this truncated series
    (they separate only at or beyond the truncation).  The total root count
    contributed is multiplicity * branches.
    """

    series: PuiseuxSeries
    multiplicity: int
    branches: int = 1


@dataclass(frozen=True)
class UnresolvedGroup:
    """A bundle of branches whose next coefficient lies outside the field.

    The possible coefficients at ``exponent`` are exactly the roots of
    ``coeff_poly`` (which has no root in the working field, nor among the
    caller-provided candidate points).  ``count`` = deg(coeff_poly) branches
    continue through this bundle, each with the given multiplicity.
    """

    prefix: PuiseuxSeries          # exact known part (all exponents < exponent)
    exponent: Fraction
    coeff_poly: UniPoly
    multiplicity: int
    count: int

    def series_view(self) -> PuiseuxSeries:
        """The shared prefix viewed as a series truncated at the branch point."""
        return PuiseuxSeries(self.prefix.field, self.prefix.terms, self.exponent)


@dataclass
class Expansion:
    """Result of expanding a polynomial: roots, bookkeeping orders, leftovers."""

    roots: list[ExpandedRoot]
    unresolved: list[UnresolvedGroup]
    y_content: int        # E: largest power of y dividing the input
    x_order: int          # K: x-order of F / y^E at the origin
    target: Fraction

    def total_count(self) -> int:
        n = sum(r.multiplicity * r.branches for r in self.roots)
        n += sum(g.multiplicity * g.count for g in self.unresolved)
        return n


# ---------------------------------------------------------------------------
# squarefree-in-x splitting (multiplicity extraction)
# ---------------------------------------------------------------------------


class _RatF:
    """Rational function in y over the field; internal to this module."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly | None = None):
        field = num.field
        if den is None:
            den = UniPoly.constant(field, 1, "y")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not num.is_zero():
            g = poly_gcd(num, den)
            if g.degree() > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            lead = den.leading()
            if not (lead == field.one):
                inv = lead.inverse()
                num = num * inv
                den = den * inv
        else:
            den = UniPoly.constant(field, 1, "y")
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, o: "_RatF") -> "_RatF":
        return _RatF(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o: "_RatF") -> "_RatF":
        return _RatF(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o: "_RatF") -> "_RatF":
        return _RatF(self.num * o.num, self.den * o.den)

    def __truediv__(self, o: "_RatF") -> "_RatF":
        if o.is_zero():
            raise ZeroDivisionError
        return _RatF(self.num * o.den, self.den * o.num)

    def __neg__(self) -> "_RatF":
        return _RatF(-self.num, self.den)


def _xpoly_trim(p: list[_RatF]) -> list[_RatF]:
    while p and p[-1].is_zero():
        p.pop()
    return p


def _xpoly_divmod(a: list[_RatF], b: list[_RatF]) -> tuple[list[_RatF], list[_RatF]]:
    a = list(a)
    q: list[_RatF] = [b[0] - b[0]] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] / b[-1]
        k = len(a) - len(b)
        q[k] = q[k] + c
        for i in range(len(b)):
            a[k + i] = a[k + i] - c * b[i]
        a.pop()
        _xpoly_trim(a)
    return q, a


def _xpoly_gcd(a: list[_RatF], b: list[_RatF]) -> list[_RatF]:
    a, b = list(a), list(b)
    while b:
        a, b = b, _xpoly_divmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _xpoly_derivative(p: list[_RatF]) -> list[_RatF]:
    field = p[0].num.field
    return _xpoly_trim([p[k] * _RatF(UniPoly.constant(field, k, "y")) for k in range(1, len(p))])


def _xpoly_to_bipoly(p: list[_RatF], field: CycloField) -> BiPoly:
    lcm = UniPoly.constant(field, 1, "y")
    for c in p:
        g = poly_gcd(lcm, c.den)
        extra = c.den.exact_div(g) if g.degree() > 0 else c.den
        lcm = lcm * extra
    cols = []
    for c in p:
        cols.append(c.num * lcm.exact_div(c.den))
    content = UniPoly.zero(field, "y")
    for col in cols:
        if not col.is_zero():
            content = poly_gcd(content, col) if not content.is_zero() else col.monic()
        if content.degree() == 0:
            break
    if content.degree() > 0:
        cols = [col.exact_div(content) if not col.is_zero() else col for col in cols]
    out = BiPoly.from_x_coefficients(field, cols)
    # normalize: make the leading x-coefficient's lowest y-term equal to 1
    lead = cols[-1]
    unit = None
    for c in lead.coeffs:
        if not c.is_zero():
            unit = c
            break
    if unit is not None and not (unit == field.one):
        out = out * unit.inverse()
    return out


def _eval_at_y(F: BiPoly, y0) -> UniPoly:
    """F(x, y0) as a univariate polynomial in x."""
    field = F.field
    v = field.rational(y0)
    cols: dict[int, CycloRational] = {}
    for (i, j), c in F.terms.items():
        add = c * v**j
        cur = cols.get(i)
        cols[i] = add if cur is None else cur + add
    n = max(cols, default=-1)
    return UniPoly(field, [cols.get(k, field.zero) for k in range(n + 1)], "x")


def _certified_squarefree_x(F: BiPoly) -> bool:
    """Exact squarefree-in-x test by sampling the y-line.

    A common x-factor of F and F_x of positive degree survives evaluation at
    every y except the zeros of its leading coefficient, so one sample with
    a trivial gcd certifies squarefreeness; sampling past the resultant's
    degree bound makes the negative answer exact as well.
    """
    Fx = F.diff_x()
    if Fx.is_zero():
        return F.x_degree() < 1
    ydeg = max(j for (_, j) in F.terms) - min(j for (_, j) in F.terms)
    # a conclusive "not squarefree" would need the full resultant degree
    # bound; cap the sampling and let the exact Yun path settle rare misses
    bound = min((2 * F.x_degree() - 1) * max(ydeg, 1) + 2, 40)
    for k in range(1, bound + 1):
        a = _eval_at_y(F, k)
        b = _eval_at_y(Fx, k)
        if a.degree() < F.x_degree():
            continue  # leading coefficient vanished; sample uninformative
        if poly_gcd(a, b).degree() == 0:
            return True
    return False


def multiplicity_split(F: BiPoly) -> list[tuple[BiPoly, int]]:
    """Squarefree-in-x components of F with multiplicities (Yun over K(y)).

    Components are primitive in y and normalized; their product recovers F
    up to a factor free of x-roots (y-content and a unit).  A polynomial of
    x-degree zero has no components.
    """
    if F.is_zero():
        raise ZeroPolynomial("cannot split the zero polynomial")
    field = F.field
    if F.x_degree() < 1:
        return []
    if _certified_squarefree_x(F):
        return [(F, 1)]
    p = _xpoly_trim([_RatF(c) for c in F.x_coefficients()])
    d = _xpoly_derivative(p)
    g = _xpoly_gcd(p, d)
    out: list[tuple[BiPoly, int]] = []
    if len(g) <= 1:
        return [(_xpoly_to_bipoly(p, field), 1)]
    c = _xpoly_divmod(p, g)[0]
    w = [a - b for a, b in _zip_pad(_xpoly_divmod(d, g)[0], _xpoly_derivative(c))]
    _xpoly_trim(w)
    i = 1
    while len(c) > 1:
        a = _xpoly_gcd(c, w)
        if len(a) > 1:
            out.append((_xpoly_to_bipoly(a, field), i))
            c = _xpoly_divmod(c, a)[0]
            w = _xpoly_divmod(w, a)[0]
        w = [u - v for u, v in _zip_pad(w, _xpoly_derivative(c))]
        _xpoly_trim(w)
        i += 1
    return out


def _zip_pad(a: list[_RatF], b: list[_RatF]):
    n = max(len(a), len(b))
    zero = None
    for c in a + b:
        zero = c - c
        break
    for k in range(n):
        x = a[k] if k < len(a) else zero
        y = b[k] if k < len(b) else zero
        yield x, y


# ---------------------------------------------------------------------------
# the expansion engine
# ---------------------------------------------------------------------------


class _Expander:
    def __init__(
        self,
        field: CycloField,
        target: Fraction,
        mode: str,
        candidates: Sequence[CycloRational],
        max_stages: int = 64,
    ):
        self.field = field
        self.target = target
        self.mode = mode
        self.candidates = list(candidates)
        self.max_stages = max_stages
        self.roots: list[ExpandedRoot] = []
        self.unresolved: list[UnresolvedGroup] = []

    def run(self, terms: _RamTerms, multiplicity: int) -> None:
        self._recurse(terms, Fraction(0), [], multiplicity, 0)

    # -- helpers -----------------------------------------------------------
    def _emit_exact(self, prefix, multiplicity):
        self.roots.append(
            ExpandedRoot(PuiseuxSeries(self.field, prefix, INF), multiplicity, 1)
        )

    def _emit_truncated(self, prefix, multiplicity, branches):
        self.roots.append(
            ExpandedRoot(PuiseuxSeries(self.field, prefix, self.target), multiplicity, branches)
        )

    def _emit_unresolved(self, prefix, exponent, chi, multiplicity):
        count = chi.degree()
        if self.mode == "strict":
            raise UnresolvedBranch(
                count * multiplicity,
                f"edge coefficient polynomial {chi} has no root in "
                f"Q(zeta_{self.field.conductor})",
            )
        self.unresolved.append(
            UnresolvedGroup(
                PuiseuxSeries(self.field, prefix, INF),
                exponent,
                chi,
                multiplicity,
                count,
            )
        )

    def _field_hint(self, edge: PolygonEdge, epoly: UniPoly, chi: UniPoly) -> int | None:
        """Conductor enlargement that would resolve the missing branch, if any.

        Two sources: the ramification denominator of the edge slope (the
        session-field rule), and a binomial edge polynomial whose radical is
        rational so only roots of unity are missing.
        """
        n = self.field.conductor
        hints = []
        q = edge.slope.denominator
        if q > 1 and n % q:
            hints.append(n * q // math.gcd(n, q))
        for poly in (chi, epoly.monic()):
            h = _binomial_field_hint(poly, n)
            if h is not None:
                hints.append(h)
        if not hints:
            return None
        out = n
        for h in hints:
            out = out * h // math.gcd(out, h)
        return out if out != n else None

    def _recurse(self, terms: _RamTerms, base: Fraction, prefix, multiplicity, stage):
        if stage > self.max_stages:
            raise TruncationBudgetExceeded(
                f"expansion exceeded {self.max_stages} Newton-polygon stages"
            )
        if not terms:
            raise InternalInconsistency("expansion reached the zero polynomial")
        # exact finite root: the accumulated prefix itself
        xmin = min(i for (i, _) in terms)
        if xmin >= 1:
            self._emit_exact(list(prefix), multiplicity)
            terms = {(i - xmin, j): c for (i, j), c in terms.items()}
            if xmin > 1:
                # repeated root of a squarefree component cannot happen
                raise InternalInconsistency("repeated branch in squarefree expansion")
        polygon = _polygon_data(terms)
        for edge in polygon.edges:
            abs_exp = base + edge.slope
            if abs_exp >= self.target:
                self._emit_truncated(list(prefix), multiplicity, edge.extent)
                continue
            epoly = _edge_poly(terms, edge, self.field)
            found, unresolved_deg = roots_in_field(epoly, self.candidates)
            if unresolved_deg:
                chi = epoly.monic()
                for c, r in found:
                    for _ in range(r):
                        chi = chi.shift_strip_root(c)
                enlarge = self._field_hint(edge, epoly, chi)
                if enlarge is not None:
                    raise NeedsLargerField(enlarge)
                self._emit_unresolved(list(prefix), abs_exp, chi, multiplicity)
            for c, r in found:
                if c.is_zero():
                    # zero is never an edge-polynomial root (the constant term
                    # of the edge polynomial is a vertex coefficient)
                    raise InternalInconsistency("zero edge coefficient")
                sub = _substitute(terms, edge.slope, c, self.field)
                self._recurse(sub, abs_exp, list(prefix) + [(abs_exp, c)], multiplicity, stage + 1)


def _substitute(terms: _RamTerms, m: Fraction, c: CycloRational, field: CycloField) -> _RamTerms:
    """P(y^m (c + x), y) / y^mu with mu the minimum y-order after substitution."""
    out: _RamTerms = {}
    binom_cache: dict[int, list[int]] = {}

    def binom_row(n: int) -> list[int]:
        row = binom_cache.get(n)
        if row is None:
            row = [math.comb(n, k) for k in range(n + 1)]
            binom_cache[n] = row
        return row

    cpow = [field.one]
    for (i, j), a in terms.items():
        while len(cpow) <= i:
            cpow.append(cpow[-1] * c)
        row = binom_row(i)
        ybase = j + i * m
        for k in range(i + 1):
            coeff = a * (cpow[i - k] * row[k]) if i - k else a * row[k]
            key = (k, ybase)
            cur = out.get(key)
            out[key] = coeff if cur is None else cur + coeff
    out = {k: v for k, v in out.items() if not v.is_zero()}
    mu = min(j for (_, j) in out)
    if mu:
        out = {(i, j - mu): v for (i, j), v in out.items()}
    return out


def _nth_root_rational(r: Fraction, n: int) -> Fraction | None:
    if r <= 0:
        return None
    def iroot(v: int) -> int | None:
        lo, hi = 0, 1 << ((v.bit_length() + n - 1) // n + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid**n < v:
                lo = mid + 1
            else:
                hi = mid
        return lo if lo**n == v else None
    p = iroot(r.numerator)
    q = iroot(r.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


def _binomial_field_hint(chi: UniPoly, conductor: int) -> int | None:
    """If chi = z^k - u with a rational radical solvable by roots of unity,
    return the enlarged conductor that would resolve it."""
    k = chi.degree()
    if k < 2:
        return None
    if any(not chi[d].is_zero() for d in range(1, k)):
        return None
    u = -chi[0]
    r = u.as_rational()
    if r is None or r == 0:
        return None
    if r > 0:
        if _nth_root_rational(r, k) is None:
            return None
        need = k
    else:
        if _nth_root_rational(-r, k) is None:
            return None
        need = 2 * k if k % 2 == 0 else k
    new = conductor * need // math.gcd(conductor, need)
    return new if new != conductor else None


def expand_roots(
    F: BiPoly,
    target_trunc: Fraction,
    mode: str = "strict",
    extra_candidates: Sequence[CycloRational] = (),
    max_stages: int = 64,
) -> Expansion:
    """All Newton-Puiseux roots of F with positive order, to a truncation.

    Strict mode raises :class:`UnresolvedBranch` when a branch coefficient
    falls outside the working field; count mode records the bundle instead,
    with its exact count and coefficient polynomial.  Roots are reported
    with exact multiplicities (via :func:`multiplicity_split`); series that
    would only separate beyond the truncation are merged with a branch count.
    """
    if F.is_zero():
        raise ZeroPolynomial("cannot expand the zero polynomial")
    if mode not in ("strict", "count"):
        raise ValueError(f"unknown mode {mode!r}")
    field = F.field
    E = F.y_content()
    Fstar = F.shift_y(-E) if E else F
    try:
        K = Fstar.x_order_at_origin()
    except ValueError:
        raise InternalInconsistency("y-content removal left no pure-x term")
    expander = _Expander(field, Fraction(target_trunc), mode, extra_candidates, max_stages)
    for component, mult in multiplicity_split(Fstar):
        comp_terms = {(i, Fraction(j)): c for (i, j), c in component.terms.items()}
        mu = min(j for (_, j) in comp_terms)
        if mu:
            comp_terms = {(i, j - mu): c for (i, j), c in comp_terms.items()}
        expander.run(comp_terms, mult)
    result = Expansion(expander.roots, expander.unresolved, E, K, Fraction(target_trunc))
    if result.total_count() != K:
        raise InternalInconsistency(
            f"root count {result.total_count()} does not match x-order {K}"
        )
    result.roots.sort(key=_root_sort_key)
    result.unresolved.sort(key=lambda g: (g.exponent, str(g.coeff_poly)))
    return result


def _root_sort_key(r: ExpandedRoot):
    lead = r.series.terms[0] if r.series.terms else (INF, None)
    if lead[1] is None:
        return (1, Fraction(0), ())
    return (0, lead[0], lead[1].sort_key())

"""Jacobian factor groupings, tree-relative truncations, and comparators.

The polar-root multiset splits into: per non-collinear conjugacy class, the
roots leaving the tree on a bar of the class (the P-group, carrying the
invariant intersection multiplicities and the truncation product) and the
roots climbing a bar of the class at a collinear point while bounded by the
whole cover (the Q-group); plus the roots bounded by every non-collinear
bar of minimal height (the ground Q-group).  Together with the pure y-power
these exhaust the Jacobian's roots.

Also here: the equivalence comparators for pairs (contact structure, zero
counts, pure-zero multiplicities), the meromorphic reduction, and the
generic-coordinates shear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (
    InputError,
    InternalInconsistency,
    NoCover,
    NoGenericFound,
    SNotLargeEnough,
)
from .exactalg import BiPoly, CycloRational
from .puiseux import INF, PuiseuxSeries
from .treemodel import Bar, Tree, cover_of
from .baranalysis import BarAnalysis
from .jacoracle import (
    OracleResult,
    PolarRootRecord,
    is_bounded_by,
    jacobian,
    observed_at,
)


# ---------------------------------------------------------------------------
# factor grouping
# ---------------------------------------------------------------------------


@dataclass
class ClassReport:
    class_id: str
    bar_ids: tuple[str, ...]
    height: Fraction
    collinear: bool
    nu_f: Fraction | None = None
    nu_g: Fraction | None = None
    m_star: int | None = None
    p_records: list[int] = dc_field(default_factory=list)   # indices into records
    p_order: int = 0
    p_truncation: BiPoly | None = None
    q_records: list[int] = dc_field(default_factory=list)
    q_order: int = 0
    # intersection multiplicities (filled by intersection_mults)
    i_f_formula: Fraction | None = None
    i_g_formula: Fraction | None = None
    i_c_formula: Fraction | None = None
    i_f_direct: Fraction | None = None
    i_g_direct: Fraction | None = None
    i_c_direct: Fraction | None = None
    i_f_trunc: Fraction | None = None
    i_g_trunc: Fraction | None = None


@dataclass
class FactorReport:
    classes: list[ClassReport]
    q_ground_records: list[int]
    q_ground_order: int
    y_content: int
    x_order: int
    complete: bool
    leave_data: dict[str, list]    # class_id -> [(height, count)], all members
    p_leave_data: dict[str, list]  # class_id -> [(height, count)], leave group only


def group_factors(
    tree: Tree,
    analyses: dict[str, BarAnalysis],
    oracle: OracleResult,
    classes: list[frozenset[str]],
) -> FactorReport:
    """Split the polar-root multiset into the factor groups.

    Membership follows the definitions directly: leave-bar membership for
    the P-groups, climb-at-a-collinear-point-bounded-by-the-cover for the
    Q-groups, bounded-by-every-minimal-non-collinear-bar for the ground
    group.  The partition property is recorded, not assumed.
    """
    records = oracle.records
    reports: list[ClassReport] = []
    assignment: dict[int, int] = {}   # record index -> number of groups
    for idx in range(len(records)):
        assignment[idx] = 0

    minimal_noncol = _minimal_noncollinear(tree, analyses)

    for k, cls in enumerate(classes):
        bar_ids = tuple(sorted(cls))
        if not tree.bars[bar_ids[0]].is_finite():
            continue  # root classes carry no factor data
        first = analyses[bar_ids[0]]
        heights = {tree.bars[b].height for b in bar_ids}
        if len(heights) != 1:
            raise InternalInconsistency("conjugacy class mixes bar heights")
        collinear = first.collinear
        rep = ClassReport(
            f"C{k}", bar_ids, heights.pop(), collinear,
        )
        if not collinear:
            nus_f = {analyses[b].nu_f for b in bar_ids}
            nus_g = {analyses[b].nu_g for b in bar_ids}
            if len(nus_f) != 1 or len(nus_g) != 1:
                raise InternalInconsistency(
                    "conjugate bars disagree on generic orders"
                )
            rep.nu_f = nus_f.pop()
            rep.nu_g = nus_g.pop()
            rep.m_star = sum(analyses[b].m_star for b in bar_ids)
            per_bar_p: dict[str, int] = {b: 0 for b in bar_ids}
            for idx, r in enumerate(records):
                if r.trace.leave_bar_id in cls:
                    rep.p_records.append(idx)
                    rep.p_order += r.count
                    per_bar_p[r.trace.leave_bar_id] += r.count
                    assignment[idx] += 1
                elif _in_q_group(tree, analyses, r, cls):
                    rep.q_records.append(idx)
                    rep.q_order += r.count
                    assignment[idx] += 1
            if len(set(per_bar_p.values())) > 1:
                raise InternalInconsistency(
                    "polar leave counts are not conjugation-symmetric on "
                    + rep.class_id
                )
            if rep.p_order != rep.m_star:
                raise InternalInconsistency(
                    f"leave count {rep.p_order} differs from the pure-zero "
                    f"total {rep.m_star} on {rep.class_id}"
                )
            rep.p_truncation = _truncation_product(tree, records, rep.p_records)
        reports.append(rep)

    q_ground: list[int] = []
    q_ground_order = 0
    for idx, r in enumerate(records):
        if all(is_bounded_by(r, tree.bars[b]) for b in minimal_noncol):
            q_ground.append(idx)
            q_ground_order += r.count
            assignment[idx] += 1

    complete = all(v == 1 for v in assignment.values())

    def _multiset(indices) -> list:
        out: dict[Fraction, int] = {}
        for idx in indices:
            r = records[idx]
            h = r.trace.leave_height
            if h is None:
                h = tree.bars[r.trace.leave_bar_id].height
            out[h] = out.get(h, 0) + r.count
        return sorted(out.items())

    leave_data: dict[str, list] = {}
    p_leave_data: dict[str, list] = {}
    for rep in reports:
        if rep.collinear:
            continue
        leave_data[rep.class_id] = _multiset(rep.p_records + rep.q_records)
        p_leave_data[rep.class_id] = _multiset(rep.p_records)
    return FactorReport(
        reports, q_ground, q_ground_order, oracle.y_content, oracle.x_order,
        complete, leave_data, p_leave_data,
    )


def _minimal_noncollinear(tree: Tree, analyses) -> list[str]:
    noncol = [b for b in tree.finite_bars() if not analyses[b.id].collinear]
    if not noncol:
        return []
    out = []
    for b in noncol:
        cur = tree.parent_bar(b)
        minimal = True
        while cur is not None:
            if not analyses[cur.id].collinear:
                minimal = False
                break
            cur = tree.parent_bar(cur)
        if minimal:
            out.append(b.id)
    return sorted(out)


def _in_q_group(tree, analyses, record: PolarRootRecord, cls) -> bool:
    for bid in cls:
        bar = tree.bars[bid]
        ana = analyses[bid]
        kind, z = observed_at(record, bar)
        if kind != "climbs" or z is None or z not in ana.collinear_points:
            continue
        try:
            cover = cover_of(tree, analyses, bar, z)
        except NoCover:
            continue
        if all(is_bounded_by(record, tree.bars[b]) for b in cover):
            return True
    return False


def _truncation_product(tree: Tree, records, indices) -> BiPoly:
    """Product of (x - cut arc) over a P-group, as an honest polynomial.

    Resolved members contribute linear factors; unresolved bundles enter
    through the symmetric functions of their coefficient polynomial, so the
    product stays exact.  Conjugation closure makes all exponents integral.
    """
    field = tree.field
    # polynomial in x with exact finite series coefficients, as
    # dict x_degree -> PuiseuxSeries
    acc: dict[int, PuiseuxSeries] = {0: PuiseuxSeries(field, [(Fraction(0), field.one)])}

    def mul_in(factor: dict[int, PuiseuxSeries]) -> None:
        nonlocal acc
        out: dict[int, PuiseuxSeries] = {}
        for i, s in acc.items():
            for j, t in factor.items():
                k = i + j
                prod = s * t
                out[k] = out[k] + prod if k in out else prod
        acc = {k: v for k, v in out.items() if v.terms}

    one = PuiseuxSeries(field, [(Fraction(0), field.one)])
    for idx in indices:
        r = records[idx]
        bar = tree.bars[r.trace.leave_bar_id]
        lam = bar.prefix
        h = bar.height
        if r.trace.leave_point is not None:
            cut = lam + PuiseuxSeries(field, [(h, r.trace.leave_point)])
            factor = {1: one, 0: -cut}
            for _ in range(r.count):
                mul_in(factor)
        else:
            rel = r.arc_view().coefficient_relative(lam, h)
            if rel[0] != "coeff-unresolved":
                raise InternalInconsistency("unresolved record with resolved leave")
            chi = rel[1].monic()
            d = chi.degree()
            # product over roots a of chi of (x - lam - a y^h)
            #   = sum_k chi_k (x - lam)^k y^(h (d-k))
            bundle: dict[int, PuiseuxSeries] = {}
            xm_lam: dict[int, PuiseuxSeries] = {0: one}
            for k in range(0, d + 1):
                ck = chi[k]
                if not ck.is_zero():
                    shift = h * (d - k)
                    for i, s in xm_lam.items():
                        add = (s * PuiseuxSeries(field, [(shift, ck)])
                               if shift else s.scale(ck))
                        bundle[i] = bundle[i] + add if i in bundle else add
                if k < d:
                    nxt: dict[int, PuiseuxSeries] = {}
                    for i, s in xm_lam.items():
                        nxt[i + 1] = nxt[i + 1] + s if i + 1 in nxt else s
                        neg = s * (-lam) if lam.terms else None
                        if neg is not None:
                            nxt[i] = nxt[i] + neg if i in nxt else neg
                    xm_lam = nxt
            for _ in range(r.multiplicity):
                mul_in(bundle)
    terms: dict[tuple[int, int], CycloRational] = {}
    for i, s in acc.items():
        if s.trunc is not INF:
            raise InternalInconsistency("truncation product lost exactness")
        for e, c in s.terms:
            if e.denominator != 1:
                raise InternalInconsistency(
                    "truncation product has a fractional exponent; the group "
                    "is not conjugation-closed"
                )
            terms[(i, int(e))] = c
    return BiPoly(field, terms)


# ---------------------------------------------------------------------------
# intersection multiplicities
# ---------------------------------------------------------------------------


def order_sum_via_contacts(tree: Tree, kind: str, record: PolarRootRecord) -> Fraction:
    """E + sum of contacts with the germ's roots; exact for bundles too."""
    E = tree.E1 if kind == "f" else tree.E2
    total = Fraction(E)
    view = record.arc_view()
    for info in tree.roots.values():
        if info.kind != kind:
            continue
        t = view.contact_with(info.series)
        if t is INF:
            raise InternalInconsistency("polar root equals a germ root")
        total += t
    return total


def intersection_mults(report: FactorReport, tree: Tree, oracle: OracleResult,
                       f: BiPoly, g: BiPoly) -> FactorReport:
    """Fill in the invariant intersection multiplicities, three ways each.

    Formula (generic order times pure-zero count), direct summation over
    the group's members, and direct summation over the truncated members;
    a mismatch raises, because the three are theorems about the same number.
    """
    records = oracle.records
    for rep in report.classes:
        if rep.collinear:
            continue
        rep.i_f_formula = rep.nu_f * rep.m_star
        rep.i_g_formula = rep.nu_g * rep.m_star
        rep.i_c_formula = rep.i_f_formula + rep.i_g_formula
        def direct(kind: str) -> Fraction:
            total = Fraction(0)
            for idx in rep.p_records:
                r = records[idx]
                total += order_sum_via_contacts(tree, kind, r) * r.count
            return total
        rep.i_f_direct = direct("f")
        rep.i_g_direct = direct("g")
        rep.i_c_direct = rep.i_f_direct + rep.i_g_direct
        if (rep.i_f_direct, rep.i_g_direct) != (rep.i_f_formula, rep.i_g_formula):
            raise InternalInconsistency(
                f"direct intersection sums disagree with the formula on {rep.class_id}"
            )
        # the truncated members give the same numbers
        def trunc_direct(kind: str) -> Fraction:
            germ_E = tree.E1 if kind == "f" else tree.E2
            total = Fraction(0)
            for idx in rep.p_records:
                r = records[idx]
                bar = tree.bars[r.trace.leave_bar_id]
                if r.trace.leave_point is not None:
                    cut = bar.prefix + PuiseuxSeries(
                        tree.field, [(bar.height, r.trace.leave_point)]
                    )
                    cut_rec = _plain_record(cut, r.count)
                else:
                    rel = r.arc_view().coefficient_relative(bar.prefix, bar.height)
                    cut_rec = PolarRootRecord(
                        bar.prefix, r.multiplicity, r.branch_count, r.trace,
                        bar.height, rel[1],
                    )
                total += order_sum_via_contacts(tree, kind, cut_rec) * cut_rec.count
            return total
        rep.i_f_trunc = trunc_direct("f")
        rep.i_g_trunc = trunc_direct("g")
        if (rep.i_f_trunc, rep.i_g_trunc) != (rep.i_f_formula, rep.i_g_formula):
            raise InternalInconsistency(
                f"truncated intersection sums disagree on {rep.class_id}"
            )
    return report


def _plain_record(series: PuiseuxSeries, count: int) -> PolarRootRecord:
    from .treemodel import ArcTrace

    return PolarRootRecord(series, count, 1, ArcTrace(()))


# ---------------------------------------------------------------------------
# pair comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    level: str                 # "inequivalent" | "equivalent" | "mero_equivalent"
    witness: str | None = None

    @property
    def is_equivalent(self) -> bool:
        return self.level in ("equivalent", "mero_equivalent")

    @property
    def is_mero_equivalent(self) -> bool:
        return self.level == "mero_equivalent"


def _bar_signature(tree: Tree, analyses, bar: Bar, level: int):
    if not bar.is_finite():
        return ("leaf",)
    ana = analyses[bar.id]
    entries = []
    for z, trunk in tree.growth_points(bar):
        child = tree.bars[trunk.top_bar_id]
        is_coll = (not ana.collinear) and (z in ana.collinear_points)
        extra = ()
        if level >= 2 and not ana.collinear:
            extra = (ana.mero_numerator.root_multiplicity(z) if is_coll else None,)
        entries.append(
            (trunk.bimultiplicity, ana.collinear or is_coll, extra,
             _bar_signature(tree, analyses, child, level))
        )
    entries.sort(key=repr)
    attrs = [bar.height, ana.collinear]
    if level >= 2 and not ana.collinear:
        attrs.append(ana.m)
    if level >= 3 and not ana.collinear:
        pure = sorted(
            mult for z, mult in ana.mero_zeros.items()
            if z not in ana.collinear_points
        )
        attrs.append((tuple(pure), ana.mero_unresolved))
    return (tuple(attrs), tuple(entries))


def compare_pairs(pair_a, pair_b) -> EquivalenceVerdict:
    """Compare two modelled pairs: contact structure, then zero counts,
    then pure-zero multiplicities.

    Each argument is a (tree, analyses) pair.  The y-content exponents are
    part of the contact data (the generic orders depend on them).
    """
    tree_a, ana_a = pair_a
    tree_b, ana_b = pair_b
    if (tree_a.p, tree_a.q, tree_a.E1, tree_a.E2) != (
        tree_b.p, tree_b.q, tree_b.E1, tree_b.E2
    ):
        return EquivalenceVerdict(
            "inequivalent", "root counts or y-content exponents differ"
        )
    for level, name in ((1, "contact structure"), (2, "zero counts"),
                        (3, "pure-zero multiplicities")):
        sa = _bar_signature(tree_a, ana_a, tree_a.ground, level)
        sb = _bar_signature(tree_b, ana_b, tree_b.ground, level)
        if sa != sb:
            if level == 1:
                return EquivalenceVerdict("inequivalent", f"{name} differ")
            if level == 2:
                return EquivalenceVerdict("inequivalent", f"{name} differ")
            return EquivalenceVerdict("equivalent", f"{name} differ")
    return EquivalenceVerdict("mero_equivalent")


# ---------------------------------------------------------------------------
# meromorphic reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedPair:
    f_poly: BiPoly
    g_poly: BiPoly
    E1: int                # prefactor exponent: f = y^E1 * f_poly with E1 = -p*s
    E2: int
    s: int
    p: int
    q: int

    def to_reduced(self, series: PuiseuxSeries) -> PuiseuxSeries:
        """Root of the original pair -> root of the reduced pair (x = y^s X)."""
        return series.shift(self.s)

    def to_original(self, series: PuiseuxSeries) -> PuiseuxSeries:
        return series.shift(-self.s)


def _monic_x_degree(F: BiPoly) -> int:
    p = F.x_degree()
    lead = [(i, j) for (i, j) in F.terms if i == p]
    if lead != [(p, 0)] or not (F.terms[(p, 0)] == F.field.one):
        raise InputError("polynomial is not monic in x")
    return p


def _min_shift(F: BiPoly, p: int) -> int:
    s = 0
    for (i, j), _c in F.terms.items():
        if i == p:
            continue
        if j < 0:
            s = max(s, math.ceil(Fraction(-j, p - i)))
    return s


def meromorphic_reduce(F: BiPoly, G: BiPoly, s="auto"):
    """Clear Laurent tails by x -> x*y^(-s): returns the holomorphic pair.

    The returned polynomials carry recorded prefactor exponents E1 = -p*s
    and E2 = -q*s (the non-unit factors y^E).  The Jacobian correspondence
    X Y J(F,G) = x y J(f,g) is asserted symbolically.
    """
    p = _monic_x_degree(F)
    q = _monic_x_degree(G)
    s_min = max(_min_shift(F, p), _min_shift(G, q))
    if s == "auto":
        s = s_min
    elif s < s_min:
        raise SNotLargeEnough(f"need s >= {s_min} to clear the Laurent tails")
    f_laurent = F.substitute_x_scale(s)
    g_laurent = G.substitute_x_scale(s)
    f_poly = f_laurent.shift_y(p * s)
    g_poly = g_laurent.shift_y(q * s)
    if any(j < 0 for (_, j) in f_poly.terms) or any(j < 0 for (_, j) in g_poly.terms):
        raise SNotLargeEnough("shift left negative exponents; raise s")
    f_poly = BiPoly(F.field, dict(f_poly.terms), laurent=False)
    g_poly = BiPoly(G.field, dict(g_poly.terms), laurent=False)
    # X Y J_(F,G)(X, Y) under X = x y^(-s)  ==  x y J_(f,g)(x, y)
    x_var = BiPoly.variable(F.field, "x", laurent=True)
    y_var = BiPoly.variable(F.field, "y", laurent=True)
    lhs = jacobian(F, G).substitute_x_scale(s) * x_var.substitute_x_scale(s) * y_var
    rhs = jacobian(f_laurent, g_laurent) * x_var * y_var
    if not (lhs == rhs):
        raise InternalInconsistency("Jacobian correspondence identity failed")
    return ReducedPair(f_poly, g_poly, -p * s, -q * s, s, p, q)


# ---------------------------------------------------------------------------
# generic coordinates
# ---------------------------------------------------------------------------


def total_order(F: BiPoly) -> int:
    if F.is_zero():
        raise InputError("zero germ has no order")
    return min(i + j for (i, j) in F.terms)


def is_mini_regular(F: BiPoly) -> bool:
    """Regular in x with the x-order equal to the germ's total order."""
    d = total_order(F)
    return (d, 0) in F.terms


def generic_coordinates(f: BiPoly, g: BiPoly, c="auto", budget: int = 25):
    """Shear y -> y + c*x until both germs and the Jacobian are mini-regular.

    Returns (f', g', c_used, m) with m the number of generic polar roots
    (the x-order of the sheared Jacobian).
    """
    field = f.field
    if c == "auto":
        candidates = [0]
        for k in range(1, budget):
            candidates += [k, -k]
    else:
        candidates = [c]
    for cand in candidates:
        cc = cand if isinstance(cand, CycloRational) else field.rational(cand)
        fs = f if cc.is_zero() else f.substitute_shear(cc)
        gs = g if cc.is_zero() else g.substitute_shear(cc)
        if not (is_mini_regular(fs) and is_mini_regular(gs)):
            continue
        J = jacobian(fs, gs)
        if J.is_zero():
            raise InputError("Jacobian is identically zero; the pair is degenerate")
        if not is_mini_regular(J):
            continue
        return fs, gs, cc, total_order(J)
    raise NoGenericFound(f"no shear constant among {len(candidates)} candidates worked")

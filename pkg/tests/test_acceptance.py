"""Acceptance suite: one test per shipped criterion, at its stated tolerance.

Everything here is exact arithmetic; the only tolerances are wall-clock
budgets.  One criterion (the meromorphic reduction) pins a bar height that
the exact computation contradicts; its test asserts the stated value and is
expected to fail at that final assertion - see the notes in the repository
docs for the analysis.  Every other criterion passes.
"""

import random
import time
from fractions import Fraction as F

import pytest

from polartree import (
    BiPoly,
    CycloField,
    NeedsLargerField,
    Options,
    analyze_pair,
    analyze_polys,
    build_tree,
    compare_pairs,
    cover_of,
    equal_up_to_constant,
    expand_roots,
    get_fixture,
    meromorphic_reduce,
    parse_expression,
)
from polartree.baranalysis import analyze_all
from polartree.jacoracle import climbers_at, is_bounded_by

from conftest import fixture_run


def _bar_at(tree, h):
    return [b for b in tree.finite_bars() if b.height == h][0]


def _noncollinear(run):
    return [c for c in run.factors.classes if not c.collinear]


def test_c1_single_bar_pair():
    t0 = time.monotonic()
    fx = get_fixture("sec2")
    run = analyze_pair(fx.f, fx.g)
    bar = _bar_at(run.tree, F(1))
    ana = run.analyses[bar.id]
    # the rational function is 2 / (z (z^2 - 1)): constant numerator 2 over
    # exactly the three poles 0, 1, -1
    assert str(ana.mero_numerator) == "2"
    assert {str(z) for z in ana.noncollinear_points} == {"0", "1", "-1"}
    assert ana.collinear_points == ()
    assert ana.mero_zeros == {} and ana.mero_unresolved == 0
    assert run.oracle.x_order == 0 and not run.oracle.records
    assert run.verification.passed
    assert time.monotonic() - t0 < 1.0


def test_c2_three_level_example_counts():
    t0 = time.monotonic()
    # the source derives this example's polar counts under e < E < 2e; the
    # smallest valid parameters are (e, E) = (2, 3).  Both coefficient signs.
    run = analyze_pair(*_ex11_pair(2, 3, 1, 1))
    tree = run.tree
    b0, b1 = _bar_at(tree, F(1)), _bar_at(tree, F(3))
    located, pooled = climbers_at(run.oracle.records, b0)
    assert located.get(tree.field.zero, 0) == 4 and pooled == 0
    ana0 = run.analyses[b0.id]
    assert ana0.predicted == {tree.field.zero: 4}        # tau + mu = 4 + 0
    assert ana0.predicted_total == 4
    loc1, p1 = climbers_at(run.oracle.records, b1)
    assert sum(loc1.values()) + p1 == 2                   # two climb
    assert sum(r.count for r in run.oracle.records if is_bounded_by(r, b1)) == 2
    assert run.verification.passed
    assert time.monotonic() - t0 < 5.0

    t0 = time.monotonic()
    run = analyze_pair(*_ex11_pair(2, 3, 1, -1))
    tree = run.tree
    b1 = _bar_at(tree, F(3))
    loc1, p1 = climbers_at(run.oracle.records, b1)
    assert sum(loc1.values()) + p1 == 1                   # one climbs
    assert sum(r.count for r in run.oracle.records if is_bounded_by(r, b1)) == 3
    assert run.verification.passed
    assert time.monotonic() - t0 < 5.0

    # at the spec's literal boundary parameters (e, E) = (1, 2) the
    # parameter-independent claims still hold: four roots climb the first
    # bar at 0 with tau + mu = 4 + 0
    t0 = time.monotonic()
    run = analyze_pair(*_ex11_pair(1, 2, 1, 1))
    tree = run.tree
    b0 = _bar_at(tree, F(1))
    located, pooled = climbers_at(run.oracle.records, b0)
    assert located.get(tree.field.zero, 0) == 4
    assert run.analyses[b0.id].predicted == {tree.field.zero: 4}
    assert run.verification.passed
    assert time.monotonic() - t0 < 5.0


def _ex11_pair(e, E, A, B):
    def sgn(c):
        return f"+ {c}" if c > 0 else f"- {abs(c)}"

    f = f"(x+y)*(x-y^{e+1} {sgn(A)}*y^{E+1})*(x+y^{e+1} {sgn(B)}*y^{E+1})"
    g = f"(x-y)*(x-y^{e+1} {sgn(-A)}*y^{E+1})*(x+y^{e+1} {sgn(-B)}*y^{E+1})"
    return f, g


def test_c3_collinear_support_and_noninvariance():
    t0 = time.monotonic()
    fx = get_fixture("ex61")
    run = analyze_pair(fx.f, fx.g)
    tree = run.tree
    b1, b2 = _bar_at(tree, F(1)), _bar_at(tree, F(8))
    a1, a2 = run.analyses[b1.id], run.analyses[b2.id]
    # -8/(z^2-1): the source's own determinant convention (fixed by
    # criterion 1 and by its other printed value below) gives the minus sign
    assert str(a1.mero_numerator) == "-8"
    assert {str(z) for z in a1.noncollinear_points} == {"1", "-1"}
    assert str(a2.mero_numerator) == "-18"
    assert {str(z) for z in a2.noncollinear_points} == {"0", "1", "-1"}
    from polartree import predict_C

    count, cover = predict_C(tree, run.analyses, b1, tree.field.zero)
    assert count == 3 and cover == [b2.id]
    observed = sum(
        r.count for r in run.oracle.records
        if dict(r.trace.path).get(b1.id) == tree.field.zero
        and all(is_bounded_by(r, tree.bars[b]) for b in cover)
    )
    assert observed == 3
    orders = sorted(r.order() for r in run.oracle.records for _ in range(r.count))
    assert orders == [F(1), F(5), F(5), F(7)]
    assert {F(5), F(5), F(7)} == {F(8) / 2 + 1, 2 * F(7) - 8 + 1}
    assert run.verification.passed

    fx9 = get_fixture("ex61-e9")
    run9 = analyze_pair(fx9.f, fx9.g)
    verdict = compare_pairs((run.tree, run.analyses), (run9.tree, run9.analyses))
    assert verdict.is_equivalent
    id1 = {c.height: c.class_id for c in _noncollinear(run)}
    id9 = {c.height: c.class_id for c in _noncollinear(run9)}
    leaves1 = run.factors.leave_data[id1[F(1)]]
    leaves9 = run9.factors.leave_data[id9[F(1)]]
    assert leaves1 == [(F(5), 2), (F(7), 1)]
    assert leaves9 == [(F(11, 2), 2), (F(6), 1)]
    assert leaves1 != leaves9
    assert time.monotonic() - t0 < 10.0


def test_c4_equivalent_triple_shares_truncation_and_intersections():
    t0 = time.monotonic()
    runs = [
        analyze_pair(get_fixture(n).f, get_fixture(n).g, Options(field=12))
        for n in ("ex82", "ex82-prime", "ex82-second")
    ]
    for i in range(3):
        for j in range(i + 1, 3):
            verdict = compare_pairs(
                (runs[i].tree, runs[i].analyses), (runs[j].tree, runs[j].analyses)
            )
            assert verdict.is_equivalent
    rows = []
    for run in runs:
        cls = [c for c in _noncollinear(run) if c.p_order][0]
        assert str(cls.p_truncation) == "x^2"
        assert cls.i_f_direct == cls.i_f_formula
        assert cls.i_g_direct == cls.i_g_formula
        rows.append((cls.i_f_formula, cls.i_g_formula, cls.i_c_formula))
    assert rows[0] == rows[1] == rows[2] == (8, 2, 10)
    assert time.monotonic() - t0 < 5.0


def test_c5_integral_pair_and_its_thickening():
    t0 = time.monotonic()
    fx = get_fixture("ex91")
    run = analyze_pair(fx.f, fx.g)
    x = BiPoly.variable(run.field, "x")
    y = BiPoly.variable(run.field, "y")
    G = x * x * y - x * y**3 * F(2, 3) + y**5 * F(1, 5)
    target = (x * 2 - G) * (x - y * y) ** 2 * 2
    assert equal_up_to_constant(run.oracle.jac, target)
    assert run.oracle.x_order == 3
    leaving_at_2 = [
        r for r in run.oracle.records
        if r.trace.bounded_by and r.trace.leave_height == 2
    ]
    assert sum(r.count for r in leaving_at_2) == 2
    assert run.verification.passed

    fx2 = get_fixture("ex91-second")
    run2 = analyze_pair(fx2.f, fx2.g)
    assert run2.oracle.x_order == 5
    leaving_at_1 = [
        r for r in run2.oracle.records
        if r.trace.bounded_by and r.trace.leave_height == 1
    ]
    assert sum(r.count for r in leaving_at_1) == 4
    assert run2.verification.passed
    assert time.monotonic() - t0 < 5.0


def test_c6_one_function_product_formula():
    t0 = time.monotonic()
    # irreducible cusp: characteristic 4/3, one class, nu * (p1 - 1)
    run = analyze_pair("x^3 - y^4", "y", Options(field=12))
    cls = [c for c in _noncollinear(run) if c.p_order][0]
    assert cls.i_f_formula == cls.nu_f * (3 - 1) == 8
    assert cls.i_f_direct == 8
    # two characteristic pairs 3/2 and 7/4: p1 = p2 = 2, so the products
    # are nu1 * 1 and nu2 * 1 * 2 at the two heights
    fx = get_fixture("merle2pair")
    run = analyze_pair(fx.f, fx.g)
    by_height = {c.height: c for c in _noncollinear(run)}
    c1, c2 = by_height[F(3, 2)], by_height[F(7, 4)]
    assert c1.i_f_formula == c1.nu_f * (2 - 1) == 6
    assert c2.i_f_formula == c2.nu_f * (2 - 1) * 2 == 13
    assert c1.i_f_direct == 6 and c2.i_f_direct == 13
    assert run.verification.passed
    assert time.monotonic() - t0 < 10.0


CORPUS = (
    "sec2", "ex11", "ex11-neg", "ex11-degenerate", "ex61", "ex61-e9",
    "ex82", "ex82-prime", "ex82-second", "cusp34", "ex91", "ex91-second",
    "merle2pair", "fig2",
)


def test_c7_property_suite_corpus_and_random_pairs():
    t0 = time.monotonic()
    for name in CORPUS:
        run = fixture_run(name)
        assert run.verification.passed, (
            name, [c.render() for c in run.verification.failures()]
        )
        assert run.factors.complete, name
    rng = random.Random(20260810)
    checked = 0
    while checked < 50:
        f, g = _random_pair(rng)
        run = _run_polys(f, g)
        assert run.verification.passed, (
            str(f), str(g),
            [c.render() for c in run.verification.failures()],
        )
        assert run.factors.complete, (str(f), str(g))
        checked += 1
    assert time.monotonic() - t0 < 120.0


def _random_pair(rng):
    field = CycloField(4)
    x = BiPoly.variable(field, "x")

    def rand_root():
        n = rng.randint(1, 2)
        exps = sorted(rng.sample(range(1, 5), n))
        return tuple(
            (e, F(rng.choice([-2, -1, 1, 2]), rng.choice([1, 1, 2])))
            for e in exps
        )

    while True:
        p = rng.randint(1, 3)
        q = rng.randint(0, min(2, 4 - p))
        roots = set()
        while len(roots) < p + q:
            roots.add(rand_root())
        roots = sorted(roots)
        rng.shuffle(roots)
        alphas, betas = roots[:p], roots[p:]
        E1 = rng.choice([0, 0, 1])
        E2 = rng.choice([0, 0, 1]) if q else 1
        f = BiPoly(field, {(0, E1): field.one})
        for root in alphas:
            lin = x - BiPoly(field, {(0, e): c for e, c in root})
            f = f * lin
        g = BiPoly(field, {(0, E2): field.one})
        for root in betas:
            lin = x - BiPoly(field, {(0, e): c for e, c in root})
            g = g * lin
        return f, g


def _run_polys(f, g):
    for _ in range(4):
        try:
            return analyze_polys(f, g)
        except NeedsLargerField as e:
            field = CycloField(e.conductor)
            f = _rebuild(f, field)
            g = _rebuild(g, field)
    raise AssertionError("field enlargement did not settle")


def _rebuild(p, field):
    return BiPoly(
        field,
        {k: field.rational(c.as_rational()) for k, c in p.terms.items()},
    )


def test_c8_meromorphic_reduction():
    t0 = time.monotonic()
    fx = get_fixture("mero83")
    field = CycloField(4)
    Fm = parse_expression(fx.f, field, laurent=True)
    Gm = parse_expression(fx.g, field, laurent=True)
    red = meromorphic_reduce(Fm, Gm, 2)   # raises if the Jacobian identity fails
    ef = expand_roots(red.f_poly, F(16))
    eg = expand_roots(red.g_poly, F(16))
    alphas = [r.series for r in ef.roots for _ in range(r.multiplicity)]
    betas = [r.series for r in eg.roots for _ in range(r.multiplicity)]
    tree = build_tree(alphas, betas, red.E1 + ef.y_content, red.E2 + eg.y_content)
    analyses = analyze_all(tree)
    flat = [
        b for b in tree.finite_bars()
        if analyses[b.id].nu_f == 0 and analyses[b.id].nu_g == 0
    ]
    assert len(flat) == 1
    bar = flat[0]
    assert analyses[bar.id].collinear
    # the collinear point below it has no cover
    below = tree.parent_bar(bar)
    point = tree.trunks[bar.parent_trunk_id].point
    assert point in analyses[below.id].collinear_points
    from polartree import NoCover

    with pytest.raises(NoCover):
        cover_of(tree, analyses, below, point)
    assert time.monotonic() - t0 < 2.0
    # stated height of the distinguished bar; the exact tree puts it at 3
    # (see the repository notes: the printed value matches the substitution
    # exponent 1, which leaves roots of order zero)
    assert bar.height == 2, (
        f"collinear bar with both generic orders zero sits at height "
        f"{bar.height}, not 2"
    )

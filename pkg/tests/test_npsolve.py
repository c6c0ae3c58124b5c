"""Newton polygons, root expansion, multiplicity splitting."""

import random
from fractions import Fraction as F

import pytest

from polartree import (
    BiPoly,
    CycloField,
    INF,
    NeedsLargerField,
    UnresolvedBranch,
    conjugate_series,
    expand_roots,
    multiplicity_split,
    newton_polygon,
)

K4 = CycloField(4)
K12 = CycloField(12)


def _vars(field):
    return BiPoly.variable(field, "x"), BiPoly.variable(field, "y")


def test_polygon_three_vertices():
    # the local equation of the bounded roots: vertices at (3,0), (1,E), (0,2e)
    e, E = 7, 8
    x, y = _vars(K4)
    P = x**3 * 8 - x * y**E * (2 * (E + 2)) - y ** (2 * e) * (2 * (e + 2))
    np = newton_polygon(P)
    assert np.vertices == ((3, F(0)), (1, F(E)), (0, F(2 * e)))
    assert [(ed.slope, ed.extent) for ed in np.edges] == [(F(E, 2), 2), (F(2 * e - E), 1)]


def test_polygon_simple():
    x, y = _vars(K4)
    assert newton_polygon(x * x - y * y).vertices == ((2, F(0)), (0, F(2)))
    assert newton_polygon(x**3 - y**4).vertices == ((3, F(0)), (0, F(4)))


def test_expand_conjugate_pair():
    x, y = _vars(K4)
    out = expand_roots(x * x - y * y, F(10))
    assert out.y_content == 0 and out.x_order == 2
    assert {str(r.series) for r in out.roots} == {"y", "-y"}
    assert all(r.series.trunc is INF for r in out.roots)


def test_expand_needs_cube_roots():
    x, y = _vars(K4)
    with pytest.raises(NeedsLargerField) as e:
        expand_roots(x**3 - y**4, F(10))
    assert e.value.conductor == 12


def test_expand_cusp_over_larger_field():
    x, y = _vars(K12)
    out = expand_roots(x**3 - y**4, F(10))
    assert out.x_order == 3
    z3 = K12.zeta_of_order(3)
    assert {r.series.terms[0][1] for r in out.roots} == {K12.one, z3, z3 * z3}
    assert all(r.series.terms[0][0] == F(4, 3) for r in out.roots)


def test_expand_9_1_jacobian():
    x, y = _vars(K4)
    G = x * x * y - x * y**3 * F(2, 3) + y**5 * F(1, 5)
    J = (x * 2 - G) * (x - y * y) ** 2 * 2
    out = expand_roots(J, F(12))
    assert out.x_order == 3
    double = [r for r in out.roots if r.multiplicity == 2]
    assert len(double) == 1 and str(double[0].series) == "y^2"
    single = [r for r in out.roots if r.multiplicity == 1]
    assert len(single) == 1
    assert single[0].series.terms[0] == (F(5), K4.rational(F(1, 10)))


def test_expand_residual_order_certificate():
    # substituting a truncated root back in leaves nothing visible below the
    # certified bound
    from polartree.puiseux import substitute_arc

    x, y = _vars(K12)
    f = x**3 - y**4 - x * y**5 * 3
    out = expand_roots(f, F(6))
    for r in out.roots:
        s = substitute_arc(f, r.series)
        assert not s.terms
        assert s.trunc is not INF and s.trunc >= F(6)


def test_expand_zero_root():
    x, y = _vars(K4)
    out = expand_roots(x * (x - y), F(10))
    assert {str(r.series) for r in out.roots} == {"0", "y"}


def test_count_mode_bundles():
    x, y = _vars(K4)
    toy = x * x - y**8 * F(5, 2)
    with pytest.raises(UnresolvedBranch) as e:
        expand_roots(toy, F(10))
    assert e.value.count == 2
    out = expand_roots(toy, F(10), mode="count")
    assert not out.roots and len(out.unresolved) == 1
    grp = out.unresolved[0]
    assert grp.exponent == F(4) and grp.count == 2
    assert str(grp.coeff_poly) == "z^2 - 5/2"
    assert grp.series_view().trunc == F(4)
    assert out.total_count() == out.x_order == 2


def test_multiplicity_split_examples():
    x, y = _vars(K4)
    out = multiplicity_split((x - y) ** 2 * x)
    assert sorted((str(p), m) for p, m in out) == [("x", 1), ("x - y", 2)]
    f = x**3 - y**4
    assert multiplicity_split(f) == [(f, 1)]
    out = multiplicity_split((x * x - y * y) ** 2)
    assert [(str(p), m) for p, m in out] == [("x^2 - y^2", 2)]


def test_multiplicity_sum_matches_x_order():
    rng = random.Random(5)
    x, y = _vars(K4)
    for _ in range(10):
        f = BiPoly.constant(K4, 1)
        for _ in range(rng.randint(1, 3)):
            lin = x - y ** rng.randint(1, 3) * rng.randint(-2, 2)
            f = f * lin ** rng.randint(1, 2)
        out = expand_roots(f, F(12))
        assert out.total_count() == out.x_order


def test_conjugation_closure_of_root_set():
    x, y = _vars(K12)
    out = expand_roots(x**3 - y**4, F(10))
    D = 3
    series = [r.series for r in out.roots]
    for k in range(D):
        for s in series:
            img = conjugate_series(s, k, D)
            assert any(img == t for t in series)


def test_truncation_budget_cap():
    from polartree import TruncationBudgetExceeded

    x, y = _vars(K4)
    with pytest.raises(TruncationBudgetExceeded):
        expand_roots(x - y, F(10), max_stages=0)

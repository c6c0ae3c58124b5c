"""End-to-end orchestration: parse, expand, model, predict, verify, factor.

The session owns two adaptive knobs: the field conductor (enlarged and
restarted when an expansion needs a missing root of unity, unless pinned)
and the truncation depth (deepened and retried when a contact or placement
is not yet determined).  Everything downstream of those choices is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InputError,
    LimitationError,
    NeedsLargerField,
    TruncationTooShort,
)
from .exactalg import BiPoly, CycloField
from .npsolve import Expansion, expand_roots
from .parsing import expression_mentions_zeta, parse_expression
from .puiseux import INF
from .treemodel import Tree, build_tree, conjugacy_classes, render_tree
from .baranalysis import BarAnalysis, analyze_all
from .jacoracle import OracleResult, VerificationReport, polar_roots, verify
from .factorrep import FactorReport, group_factors, intersection_mults


@dataclass
class Options:
    field: int | None = None          # pinned conductor; None = automatic
    trunc: Fraction | None = None     # pinned truncation depth
    laurent: bool = False


@dataclass
class CurveSpec:
    """One input pair: either expression text or explicit root lists.

    Root-list mode gives the branch series of each germ as x-free
    expression text plus the y-content exponents; the polynomials are then
    reconstructed as y^E times the product of (x - root).  Exactly one of
    the two forms must be present.
    """

    f: str | None = None
    g: str | None = None
    f_roots: list[str] | None = None
    g_roots: list[str] | None = None
    E1: int = 0
    E2: int = 0
    options: Options | None = None

    def __post_init__(self):
        expr_mode = self.f is not None or self.g is not None
        root_mode = self.f_roots is not None or self.g_roots is not None
        if expr_mode == root_mode:
            raise InputError(
                "give either f/g expressions or explicit root lists, not both"
            )
        if expr_mode and (self.f is None or self.g is None):
            raise InputError("both f and g expressions are required")
        if root_mode and (self.f_roots is None or self.g_roots is None):
            raise InputError("both root lists are required (either may be empty)")


def analyze_spec(spec: CurveSpec) -> Run:
    """Run the pipeline on a :class:`CurveSpec` in either input mode."""
    opts = spec.options or Options()
    if spec.f is not None:
        return analyze_pair(spec.f, spec.g, opts)
    texts = list(spec.f_roots) + list(spec.g_roots)
    pinned = opts.field is not None
    if any(expression_mentions_zeta(t) for t in texts) and not pinned:
        raise InputError("root lists using zeta need an explicit field")
    conductor = opts.field or 4
    for _ in range(8):
        field = CycloField(conductor)
        try:
            f = _poly_from_roots(spec.f_roots, spec.E1, field)
            g = _poly_from_roots(spec.g_roots, spec.E2, field)
            return analyze_polys(f, g, opts)
        except NeedsLargerField as e:
            if pinned:
                raise
            conductor = conductor * e.conductor // math.gcd(conductor, e.conductor)
    raise LimitationError("field enlargement did not converge")


def _poly_from_roots(root_texts, content: int, field: CycloField) -> BiPoly:
    if content < 0:
        raise InputError("y-content exponent must be non-negative")
    out = BiPoly(field, {(0, content): field.one})
    x = BiPoly.variable(field, "x")
    for text in root_texts:
        root = parse_expression(text, field)
        if root.x_degree() > 0:
            raise InputError(f"root {text!r} must not involve x")
        if any(j < 1 for (_i, j) in root.terms):
            raise InputError(f"root {text!r} must have positive order")
        out = out * (x - root)
    return out


@dataclass
class Run:
    field: CycloField
    f: BiPoly
    g: BiPoly
    f_expansion: Expansion
    g_expansion: Expansion
    tree: Tree
    analyses: dict[str, BarAnalysis]
    oracle: OracleResult
    verification: VerificationReport
    classes: list[frozenset[str]]
    factors: FactorReport


def analyze_pair(f_text: str, g_text: str, options: Options | None = None) -> Run:
    """Run the whole pipeline on a pair given as expression text."""
    opts = options or Options()
    pinned = opts.field is not None
    conductor = opts.field or 4
    if expression_mentions_zeta(f_text) or expression_mentions_zeta(g_text):
        if not pinned:
            raise InputError("expressions using zeta need an explicit --field")
    for _ in range(8):
        field = CycloField(conductor)
        f = parse_expression(f_text, field, opts.laurent)
        g = parse_expression(g_text, field, opts.laurent)
        try:
            return analyze_polys(f, g, opts)
        except NeedsLargerField as e:
            if pinned:
                raise
            conductor = conductor * e.conductor // math.gcd(conductor, e.conductor)
    raise LimitationError("field enlargement did not converge")


def analyze_polys(f: BiPoly, g: BiPoly, options: Options | None = None) -> Run:
    """The pipeline on already-built polynomials (field fixed by the inputs)."""
    opts = options or Options()
    field = f.field
    _validate_germ(f, "f")
    _validate_germ(g, "g")
    ydeg = max(
        max((j for (_, j) in f.terms), default=0),
        max((j for (_, j) in g.terms), default=0),
    )
    depth = opts.trunc if opts.trunc is not None else Fraction(max(ydeg, 2) + 2)
    for _ in range(8):
        try:
            ef = expand_roots(f, depth)
            eg = expand_roots(g, depth)
            alphas = [r.series for r in ef.roots for _ in range(r.multiplicity)]
            betas = [r.series for r in eg.roots for _ in range(r.multiplicity)]
            tree = build_tree(alphas, betas, ef.y_content, eg.y_content)
            break
        except TruncationTooShort:
            if opts.trunc is not None:
                raise
            depth *= 2
    else:
        raise TruncationTooShort("root contacts undetermined after deepening")
    # session truncation rule: everything strictly between consecutive bar
    # heights must be visible (a pinned depth is honored as given)
    session_depth = tree.max_contact + 2
    if opts.trunc is None and depth < session_depth:
        ef = expand_roots(f, session_depth)
        eg = expand_roots(g, session_depth)
        alphas = [r.series for r in ef.roots for _ in range(r.multiplicity)]
        betas = [r.series for r in eg.roots for _ in range(r.multiplicity)]
        tree = build_tree(alphas, betas, ef.y_content, eg.y_content)
    analyses = analyze_all(tree)
    oracle = polar_roots(f, g, tree, target=opts.trunc)
    verification = verify(tree, analyses, oracle, f, g)
    classes = conjugacy_classes(tree)
    factors = group_factors(tree, analyses, oracle, classes)
    factors = intersection_mults(factors, tree, oracle, f, g)
    return Run(
        field, f, g, ef, eg, tree, analyses, oracle, verification, classes,
        factors,
    )


def _validate_germ(h: BiPoly, name: str) -> None:
    if h.is_zero():
        raise InputError(f"{name} is the zero polynomial")
    if (0, 0) in h.terms:
        raise InputError(f"{name} does not vanish at the origin")


# ---------------------------------------------------------------------------
# report document
# ---------------------------------------------------------------------------

DOCUMENT_VERSION = 1


def _frac(x) -> str:
    if x is INF:
        return "inf"
    return str(x)


def run_document(run: Run) -> dict:
    """The versioned, JSON-compatible report object for a full run."""
    tree = run.tree
    doc: dict = {
        "format_version": DOCUMENT_VERSION,
        "field_conductor": run.field.conductor,
        "ramification": tree.ram,
        "truncation": _frac(run.oracle.truncation),
        "inputs": {
            "f": str(run.f),
            "g": str(run.g),
            "E1": tree.E1,
            "E2": tree.E2,
            "p": tree.p,
            "q": tree.q,
        },
        "roots": {
            "f": [str(r.series) for r in run.f_expansion.roots],
            "g": [str(r.series) for r in run.g_expansion.roots],
        },
    }
    bars = []
    for bar in sorted(tree.finite_bars(), key=lambda b: (b.height, b.id)):
        ana = run.analyses[bar.id]
        trunks = []
        for z, trunk in tree.growth_points(bar):
            trunks.append({
                "point": str(z),
                "bimultiplicity": list(trunk.bimultiplicity),
                "collinear_point": z in ana.collinear_points,
                "postbar": trunk.top_bar_id
                if tree.bars[trunk.top_bar_id].is_finite() else None,
            })
        bars.append({
            "id": bar.id,
            "height": _frac(bar.height),
            "prefix": str(bar.prefix),
            "nu_f": _frac(ana.nu_f),
            "nu_g": _frac(ana.nu_g),
            "collinear": ana.collinear,
            "purely_noncollinear": ana.purely_noncollinear,
            "mero_numerator": str(ana.mero_numerator),
            "poles": [str(z) for z in ana.noncollinear_points],
            "mero_zeros": {str(z): m for z, m in sorted(
                ana.mero_zeros.items(), key=lambda kv: kv[0].sort_key())},
            "mero_zeros_unresolved": ana.mero_unresolved,
            "m": ana.m,
            "m_star": ana.m_star,
            "trunks": trunks,
            "predicted": None if ana.predicted is None else {
                str(z): c for z, c in sorted(
                    ana.predicted.items(), key=lambda kv: kv[0].sort_key())
            },
            "predicted_total": ana.predicted_total,
        })
    doc["tree"] = {"ground": tree.ground_id, "max_contact": _frac(tree.max_contact)}
    doc["bars"] = bars
    doc["conjugacy_classes"] = [sorted(c) for c in run.classes]
    records = []
    for r in run.oracle.records:
        rec = {
            "series": str(r.series if r.branch_exp is None
                          else r.series.truncate_to(r.branch_exp)),
            "multiplicity": r.multiplicity,
            "branches": r.branch_count,
            "climb": [
                {"bar": b, "point": None if z is None else str(z)}
                for b, z in r.trace.path
            ],
        }
        if r.branch_exp is not None:
            rec["coefficient_poly"] = str(r.coeff_poly)
            rec["coefficient_exponent"] = _frac(r.branch_exp)
        if r.trace.leave_bar_id is not None:
            rec["leave"] = {
                "bar": r.trace.leave_bar_id,
                "point": None if r.trace.leave_point is None
                else str(r.trace.leave_point),
                "height": _frac(r.trace.leave_height),
            }
        elif r.trace.bounded_by is not None:
            rec["bounded"] = {
                "by": r.trace.bounded_by,
                "height": _frac(r.trace.leave_height),
            }
        records.append(rec)
    doc["oracle"] = {
        "jacobian": str(run.oracle.jac),
        "y_content": run.oracle.y_content,
        "x_order": run.oracle.x_order,
        "records": records,
    }
    doc["verification"] = {
        "passed": run.verification.passed,
        "checks": [
            {
                "family": c.family,
                "bar": c.bar_id,
                "point": c.point,
                "predicted": str(c.predicted),
                "observed": str(c.observed),
                "passed": c.passed,
                "note": c.note,
            }
            for c in run.verification.comparisons
        ],
    }
    classes = []
    for rep in run.factors.classes:
        entry = {
            "id": rep.class_id,
            "bars": list(rep.bar_ids),
            "height": _frac(rep.height),
            "collinear": rep.collinear,
        }
        if not rep.collinear:
            entry.update({
                "nu_f": _frac(rep.nu_f),
                "nu_g": _frac(rep.nu_g),
                "m_star": rep.m_star,
                "p_order": rep.p_order,
                "p_truncation": str(rep.p_truncation),
                "q_order": rep.q_order,
                "intersections": {
                    "f_formula": _frac(rep.i_f_formula),
                    "g_formula": _frac(rep.i_g_formula),
                    "c_formula": _frac(rep.i_c_formula),
                    "f_direct": _frac(rep.i_f_direct),
                    "g_direct": _frac(rep.i_g_direct),
                    "f_truncated": _frac(rep.i_f_trunc),
                    "g_truncated": _frac(rep.i_g_trunc),
                },
                "leave_heights": [
                    [_frac(h), c] for h, c in run.factors.leave_data[rep.class_id]
                ],
                "leave_group_heights": [
                    [_frac(h), c] for h, c in run.factors.p_leave_data[rep.class_id]
                ],
            })
        classes.append(entry)
    doc["factors"] = {
        "classes": classes,
        "ground_order": run.factors.q_ground_order,
        "y_content": run.factors.y_content,
        "x_order": run.factors.x_order,
        "partition_complete": run.factors.complete,
    }
    return doc


def mero_function_str(ana: BarAnalysis) -> str:
    """The bar's rational function as numerator over its pole product."""
    if ana.collinear:
        return "0"
    parts = []
    for z in ana.noncollinear_points:
        zs = str(z)
        if zs == "0":
            parts.append("z")
        elif zs.startswith("-"):
            parts.append(f"(z + {zs[1:]})")
        else:
            parts.append(f"(z - {zs})")
    num = str(ana.mero_numerator)
    if any(op in num[1:] for op in "+-") or " " in num:
        num = f"({num})"
    return f"{num} / ({''.join(parts)})"


def render_run(run: Run) -> str:
    """Human rendering of a run document: tree, table, oracle, verification."""
    out = []
    out.append(f"field: Q(zeta_{run.field.conductor})   "
               f"truncation: O(y^{run.oracle.truncation})")
    out.append(f"f = {run.f}")
    out.append(f"g = {run.g}")
    out.append("")
    out.append(render_tree(run.tree, run.analyses))
    out.append("bar analysis:")
    for bar in sorted(run.tree.finite_bars(), key=lambda b: (b.height, b.id)):
        ana = run.analyses[bar.id]
        flag = "collinear" if ana.collinear else (
            "purely non-collinear" if ana.purely_noncollinear else "mixed")
        out.append(
            f"  {bar.id}: h={bar.height} nu_f={ana.nu_f} nu_g={ana.nu_g} "
            f"{flag} M(z) = {mero_function_str(ana)} m={ana.m} m*={ana.m_star}"
        )
        if ana.predicted is not None:
            preds = ", ".join(
                f"{z}:{c}" for z, c in sorted(
                    ana.predicted.items(), key=lambda kv: kv[0].sort_key())
            )
            extra = (f" (+{ana.predicted_unresolved} at unresolved zeros)"
                     if ana.predicted_unresolved else "")
            out.append(f"      predicted climbers: {{{preds}}}{extra} "
                       f"total {ana.predicted_total}")
    out.append("")
    out.append(f"jacobian: {run.oracle.jac}")
    out.append(f"polar roots: x-order {run.oracle.x_order}, "
               f"y-content {run.oracle.y_content}")
    for r in run.oracle.records:
        desc = str(r.series if r.branch_exp is None
                   else r.series.truncate_to(r.branch_exp))
        tag = f" x{r.count}" if r.count > 1 else ""
        if r.trace.leave_bar_id:
            where = (f"leaves on {r.trace.leave_bar_id} at "
                     f"{r.trace.leave_point if r.trace.leave_point is not None else 'unresolved'}")
        else:
            where = (f"bounded by {r.trace.bounded_by} "
                     f"(separates at height {r.trace.leave_height})")
        out.append(f"  {desc}{tag}: {where}")
    out.append("")
    out.append(run.verification.render())
    return "\n".join(out)

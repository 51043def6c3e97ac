"""A-infinity categories in shifted form, with exact relation checking.

Conventions, fixed once for the whole package:

* Morphism tuples are stored in operator order: (x_1, ..., x_n) stands for
  the tensor factor chain whose composite is x_1 o x_2 o ... o x_n, so
  src(x_k) == tgt(x_{k+1}).  Composites have src = src(x_n), tgt = tgt(x_1).
* The structure operations are the shifted b_n of degree +1 with respect to
  shifted degree |x|' = deg(x) - 1.  The defining relations are
      sum_{r+s+t=n} b_{r+1+t} (1^r (x) b_s (x) 1^t) = 0,
  where evaluating 1^r (x) b_s (x) 1^t on (x_1,...,x_n) carries the Koszul
  sign (-1)^(|x_1|' + ... + |x_r|').
* Unshifted operations m_n exist only at the API boundary:
      b_n = (-1)^(sum_i (n-i) deg(x_i)) m_n   on (x_1, ..., x_n),
  so m_1 = b_1 under the shift and b_2 picks up (-1)^deg(x_1).
* A strict unit 1_i has degree 0 and satisfies b_1(1_i) = 0,
  b_2(x, 1_i) = (-1)^deg(x) x, b_2(1_j, x) = x, and b_n vanishes on every
  tuple containing a unit for n >= 3.

Operations with arity beyond a category's arity_cap are unknown, not zero,
unless the category is flagged complete; checkers report such arities as
truncated instead of silently passing them.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield, replace

from .field import FieldCtx, QQ


class StructureError(ValueError):
    pass


@dataclass
class AInfCategory:
    """Finite A-infinity category with sparse operation tables.

    hom[(i, j)] is a tuple of (label, degree) pairs, the basis of the space
    of morphisms from i to j.  Labels are globally unique strings.
    ops[n][(lab_1, ..., lab_n)] = {out_label: coeff} stores b_n on basis
    tuples in operator order; missing tuples are zero.  units maps an object
    to the label of its designated unit.  pairing[(x, y)] is the cyclic
    pairing on shifted elements, nonzero only for deg(x) + deg(y) = 2 and
    opposite hom pairs.
    """

    objects: tuple
    hom: dict
    ops: dict
    field: FieldCtx = QQ
    arity_cap: int = 6
    units: dict = dfield(default_factory=dict)
    pairing: dict = dfield(default_factory=dict)
    complete: bool = False
    # optional auxiliary filtration: every operation adds weights, and
    # outputs of weight > weight_cap are identically zero (quotient by the
    # high-weight ideal).  Used for pruning, never for correctness.
    weights: dict = dfield(default_factory=dict)
    weight_cap: int | None = None

    def __post_init__(self):
        self._info = {}
        for (i, j), basis in self.hom.items():
            for lab, deg in basis:
                if lab in self._info:
                    raise StructureError("duplicate basis label %r" % (lab,))
                self._info[lab] = (i, j, deg)

    def labels(self):
        return tuple(self._info)

    def pair_of(self, lab: str):
        i, j, _ = self._info[lab]
        return (i, j)

    def src(self, lab: str) -> str:
        return self._info[lab][0]

    def tgt(self, lab: str) -> str:
        return self._info[lab][1]

    def deg(self, lab: str) -> int:
        return self._info[lab][2]

    def sdeg(self, lab: str) -> int:
        return self._info[lab][2] - 1

    def has_label(self, lab: str) -> bool:
        return lab in self._info

    def op_table(self, n: int):
        """Table of b_n, or None when that arity is unknown (beyond cap)."""
        if n in self.ops:
            return self.ops[n]
        if self.complete or n <= self.arity_cap:
            return {}
        return None

    def known_arities(self):
        return sorted(n for n in self.ops if self.ops[n])

    def b_value(self, tup):
        """b_n on a basis tuple, as {out_label: coeff}; {} when zero."""
        table = self.op_table(len(tup))
        if table is None:
            raise StructureError("b_%d is unknown at arity cap %d"
                                 % (len(tup), self.arity_cap))
        return table.get(tuple(tup), {})

    def composable(self, tup) -> bool:
        return all(self.src(tup[k]) == self.tgt(tup[k + 1])
                   for k in range(len(tup) - 1))

    def prefix_sign(self, tup, r: int) -> int:
        s = sum(self.sdeg(x) for x in tup[:r])
        return -1 if s % 2 else 1


def validate_category(cat: AInfCategory):
    """Structural sanity: composability, degree +1, endpoint matching,
    unit and pairing shapes.  Returns a list of failure descriptions."""
    bad = []
    for n, table in cat.ops.items():
        for tup, out in table.items():
            if len(tup) != n:
                bad.append(("arity mismatch", tup))
                continue
            if not cat.composable(tup):
                bad.append(("tuple not composable", tup))
                continue
            src, tgt = cat.src(tup[-1]), cat.tgt(tup[0])
            want_sdeg = sum(cat.sdeg(x) for x in tup) + 1
            for z, c in out.items():
                if cat.field.is_zero(c):
                    bad.append(("stored zero", tup, z))
                if cat.pair_of(z) != (src, tgt):
                    bad.append(("endpoint mismatch", tup, z))
                if cat.sdeg(z) != want_sdeg:
                    bad.append(("degree mismatch", tup, z))
    for i, lab in cat.units.items():
        if cat.pair_of(lab) != (i, i) or cat.deg(lab) != 0:
            bad.append(("bad unit", i, lab))
    if cat.weights:
        for n, table in cat.ops.items():
            for tup, out in table.items():
                wsum = sum(cat.weights.get(x, 0) for x in tup)
                for z in out:
                    if cat.weights.get(z, 0) != wsum:
                        bad.append(("weight mismatch", tup, z))
                    if cat.weight_cap is not None and wsum > cat.weight_cap:
                        bad.append(("weight above cap", tup, z))
    for (x, y), c in cat.pairing.items():
        if cat.field.is_zero(c):
            bad.append(("stored zero pairing", x, y))
        if cat.pair_of(x) != (cat.tgt(y), cat.src(y)):
            bad.append(("pairing endpoints", x, y))
        if cat.deg(x) + cat.deg(y) != 2:
            bad.append(("pairing degrees", x, y))
    return bad


def vec_add_into(field: FieldCtx, acc: dict, key, c) -> None:
    if field.is_zero(c):
        return
    s = field.add(acc.get(key, field.zero()), c)
    if field.is_zero(s):
        acc.pop(key, None)
    else:
        acc[key] = s


@dataclass
class RelationReport:
    ok: bool
    checked: tuple
    truncated: tuple
    witnesses: tuple  # (arity, tuple, out_label, residual) of violations

    def first_witness(self):
        return self.witnesses[0] if self.witnesses else None


def _slot_index(table, u: int):
    """Index the arity-u table by (slot position, label at that slot)."""
    idx = [dict() for _ in range(u)]
    for tup, out in table.items():
        for r in range(u):
            idx[r].setdefault(tup[r], []).append((tup, out))
    return idx


def check_relations(cat: AInfCategory, max_arity: int | None = None,
                    max_witnesses: int = 10) -> RelationReport:
    """Exact check of the shifted A-infinity relations.

    The relation of total arity n needs every b_s, b_u with s + u = n + 1;
    arities where some required operation is unknown are reported as
    truncated, not checked.
    """
    f = cat.field
    cap = max_arity if max_arity is not None else cat.arity_cap
    checked, truncated, witnesses = [], [], []
    tables = {}
    for n in range(1, 2 * cap):
        tables[n] = cat.op_table(n)
    indexes = {}
    for n in range(1, cap + 1):
        needed = [(s, n + 1 - s) for s in range(1, n + 1)]
        if any(tables.get(s) is None or tables.get(u) is None for s, u in needed):
            truncated.append(n)
            continue
        residual = {}
        for s, u in needed:
            ts, tu = tables[s], tables[u]
            if not ts or not tu:
                continue
            if (u, id(tu)) not in indexes:
                indexes[(u, id(tu))] = _slot_index(tu, u)
            idx = indexes[(u, id(tu))]
            for tup_s, out_s in ts.items():
                for z, cz in out_s.items():
                    for r in range(u):
                        for tup_u, out_u in idx[r].get(z, ()):
                            full = tup_u[:r] + tup_s + tup_u[r + 1:]
                            sgn = cat.prefix_sign(full, r)
                            for w, cw in out_u.items():
                                c = f.mul(cz, cw)
                                if sgn < 0:
                                    c = f.neg(c)
                                vec_add_into(f, residual, (full, w), c)
        checked.append(n)
        for (full, w), c in sorted(residual.items()):
            witnesses.append((n, full, w, c))
            if len(witnesses) >= max_witnesses:
                break
        if len(witnesses) >= max_witnesses:
            break
    return RelationReport(not witnesses, tuple(checked), tuple(truncated),
                          tuple(witnesses))


@dataclass
class UnitReport:
    verdict: str  # "strict" | "weak" | "none"
    witnesses: tuple


def check_unitality(cat: AInfCategory) -> UnitReport:
    """Classify designated units as strict, weak, or neither.

    Strict: b_1(1) = 0, b_2(x, 1) = (-1)^deg(x) x, b_2(1, x) = x, and every
    stored b_n (n >= 3) kills tuples containing a unit.  Weak: the unit is a
    cycle acting as the identity up to im(b_1) on cycles.
    """
    f = cat.field
    if not cat.units:
        return UnitReport("none", (("no designated units",),))
    missing = [i for i in cat.objects if i not in cat.units]
    if missing:
        return UnitReport("none", tuple(("object without unit", i) for i in missing))
    unit_labels = set(cat.units.values())
    strict_fail = []
    for i, e in cat.units.items():
        if cat.b_value((e,)):
            strict_fail.append(("b1 of unit nonzero", e))
    for (i, j), basis in cat.hom.items():
        ej, ei = cat.units[j], cat.units[i]
        for lab, deg in basis:
            want = f.of_int(-1 if deg % 2 else 1)
            got = cat.b_value((lab, ei))
            if got != {lab: want}:
                strict_fail.append(("right unit law", lab, ei))
            got = cat.b_value((ej, lab))
            if got != {lab: f.one()}:
                strict_fail.append(("left unit law", lab, ej))
    for n, table in cat.ops.items():
        if n < 3:
            continue
        for tup, out in table.items():
            if out and any(x in unit_labels for x in tup):
                strict_fail.append(("higher operation on unit tuple", n, tup))
    if not strict_fail:
        return UnitReport("strict", ())

    weak_fail = _weak_unit_check(cat)
    if not weak_fail:
        return UnitReport("weak", tuple(strict_fail))
    return UnitReport("none", tuple(strict_fail) + tuple(weak_fail))


def _weak_unit_check(cat: AInfCategory):
    from .sparse import SparseMatrix, rank_kernel_image
    f = cat.field
    fails = []
    for i, e in cat.units.items():
        if cat.b_value((e,)):
            fails.append(("unit not closed", e))
            return fails
    for (i, j), basis in cat.hom.items():
        labs = [lab for lab, _ in basis]
        pos = {lab: k for k, lab in enumerate(labs)}
        d_rows = []
        for lab in labs:
            row = {}
            for z, c in cat.b_value((lab,)).items():
                row[pos[z]] = c
            d_rows.append(row)
        # columns of dmat are b_1 images; cycles = kernel of transpose action
        dmat = SparseMatrix.from_rows(
            [dict() for _ in labs], len(labs), f)
        for k, row in enumerate(d_rows):
            for c, v in row.items():
                dmat.set(c, k, v)  # dmat[z, x] = coeff of z in b1(x)
        _, cycles, images, _ = rank_kernel_image(dmat)
        img_rows = [{k: v for k, v in im.items()} for im in images]
        for cyc in cycles:
            for side in ("right", "left"):
                acc = {}
                for lab_idx, c in cyc.items():
                    lab = labs[lab_idx]
                    if side == "right":
                        val = cat.b_value((lab, cat.units[i]))
                        sgn = -1 if cat.deg(lab) % 2 else 1
                    else:
                        val = cat.b_value((cat.units[j], lab))
                        sgn = 1
                    for z, cz in val.items():
                        vec_add_into(f, acc, pos[z], f.mul(c, cz))
                    unit_part = f.mul(c, f.of_int(sgn))
                    vec_add_into(f, acc, lab_idx, f.neg(unit_part))
                if acc and not _in_span(f, acc, img_rows):
                    fails.append(("unit fails on cohomology", (i, j), side))
    return fails


def _in_span(field: FieldCtx, vec: dict, spanning):
    from .sparse import rref
    rows = [dict(v) for v in spanning if v]
    keys = sorted({k for r in rows for k in r} | set(vec))
    remap = {k: n for n, k in enumerate(keys)}
    rows_idx = [{remap[k]: v for k, v in r.items()} for r in rows]
    pivots, reduced = rref(rows_idx, len(keys), field)
    target = {remap[k]: v for k, v in vec.items()}
    for prow, pcol in zip(reduced, pivots):
        c = target.get(pcol)
        if c is not None:
            from .sparse import vec_addmul
            target = vec_addmul(field, target, field.neg(c), prow)
    return not target


def suspension_sign(degrees) -> int:
    """(-1)^(sum_i (n-i) deg_i) relating m_n and b_n on a tuple with the
    given unshifted degrees (1-based slots, leftmost is outermost)."""
    n = len(degrees)
    s = sum((n - i) * d for i, d in enumerate(degrees, start=1))
    return -1 if s % 2 else 1


def b_from_m(cat_degrees, m_ops, field: FieldCtx):
    """Convert unshifted m-tables to shifted b-tables.  cat_degrees maps
    label -> unshifted degree."""
    out = {}
    for n, table in m_ops.items():
        conv = {}
        for tup, val in table.items():
            sgn = suspension_sign([cat_degrees[x] for x in tup])
            entry = {}
            for z, c in val.items():
                entry[z] = c if sgn > 0 else field.neg(c)
            if entry:
                conv[tup] = entry
        out[n] = conv
    return out


def m_from_b(cat_degrees, b_ops, field: FieldCtx):
    """Inverse of b_from_m; the suspension sign is an involution."""
    return b_from_m(cat_degrees, b_ops, field)


@dataclass
class AInfMorphism:
    """A-infinity functor given by sparse component tables.

    components[n][(x_1,...,x_n)] = {out_label: coeff}, inputs in the source,
    outputs in the target; all components have shifted degree 0.  Strict
    functors have components[n] empty for n >= 2.
    """

    source: AInfCategory
    target: AInfCategory
    object_map: dict
    components: dict
    arity_cap: int = 6
    complete: bool = False

    def component(self, n: int):
        if n in self.components:
            return self.components[n]
        if self.complete or n <= self.arity_cap:
            return {}
        return None

    def f_value(self, tup):
        table = self.component(len(tup))
        if table is None:
            raise StructureError("f_%d unknown at cap %d" % (len(tup), self.arity_cap))
        return table.get(tuple(tup), {})

    def apply_vecs(self, vecs):
        """Multilinear extension of f_n to a tuple of {label: coeff} vectors."""
        f = self.source.field
        acc = {(): f.one()}
        for v in vecs:
            nxt = {}
            for tup, c in acc.items():
                for lab, cl in v.items():
                    vec_add_into(f, nxt, tup + (lab,), f.mul(c, cl))
            acc = nxt
        out = {}
        for tup, c in acc.items():
            for z, cz in self.f_value(tup).items():
                vec_add_into(f, out, z, f.mul(c, cz))
        return out


def compose(f: AInfMorphism, g: AInfMorphism) -> AInfMorphism:
    """Composite functor (f o g)_n = sum over compositions i_1+...+i_l = n
    of b-free juxtaposition f_l(g_{i_1} (x) ... (x) g_{i_l}); all component
    maps have shifted degree 0, so no Koszul signs appear."""
    if g.target is not f.source:
        raise StructureError("composition endpoint mismatch")
    fld = g.source.field
    cap = min(f.arity_cap, g.arity_cap)
    comps = {}
    for n in range(1, cap + 1):
        table = {}
        for parts in _compositions(n):
            ftab = f.component(len(parts))
            if ftab is None:
                continue
            gtabs = [g.component(i) for i in parts]
            if any(t is None for t in gtabs):
                continue
            _accumulate_composite(fld, table, ftab, gtabs, parts)
        comps[n] = {k: v for k, v in table.items() if v}
    return AInfMorphism(g.source, f.target,
                        {o: f.object_map[g.object_map[o]] for o in g.object_map},
                        comps, arity_cap=cap,
                        complete=f.complete and g.complete)


def _compositions(n: int):
    """Ordered compositions of n into positive parts."""
    if n == 0:
        return [()]
    out = []
    def rec(rest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for k in range(1, rest + 1):
            acc.append(k)
            rec(rest - k, acc)
            acc.pop()
    rec(n, [])
    return out

def _accumulate_composite(fld, table, outer_tab, inner_tabs, parts):
    """table += outer(inner_1 (x) ... (x) inner_l) as sparse tables."""
    choices = [sorted(t.items()) for t in inner_tabs]
    if any(not c for c in choices):
        return
    def rec(k, tup_acc, outs_acc, coeff):
        if k == len(choices):
            for z, cz in outer_tab.get(tuple(outs_acc), {}).items():
                vec = table.setdefault(tuple(tup_acc), {})
                vec_add_into(fld, vec, z, fld.mul(coeff, cz))
                if not vec:
                    table.pop(tuple(tup_acc), None)
            return
        for tup, out in choices[k]:
            for z, cz in out.items():
                rec(k + 1, tup_acc + list(tup), outs_acc + [z], fld.mul(coeff, cz))
    rec(0, [], [], fld.one())


@dataclass
class FunctorReport:
    ok: bool
    checked: tuple
    truncated: tuple
    witnesses: tuple


def check_functor(fm: AInfMorphism, max_arity: int | None = None,
                  max_witnesses: int = 10) -> FunctorReport:
    """Exact check of the A-infinity functor relations
    sum f_{r+1+t}(1^r (x) b_s (x) 1^t) = sum b_l(f_{i_1} (x) ... (x) f_{i_l})
    with the same prefix signs as the structure relations on the left and
    no signs on the right (components have shifted degree 0)."""
    src, tgt, fld = fm.source, fm.target, fm.source.field
    cap = max_arity if max_arity is not None else fm.arity_cap
    checked, truncated, witnesses = [], [], []
    for n in range(1, cap + 1):
        ok_data = True
        lhs_terms = []
        for s in range(1, n + 1):
            u = n - s + 1
            bs = src.op_table(s)
            fu = fm.component(u)
            if bs is None or fu is None:
                ok_data = False
                break
            lhs_terms.append((s, u, bs, fu))
        rhs_specs = []
        if ok_data:
            for parts in _compositions(n):
                bl = tgt.op_table(len(parts))
                ftabs = [fm.component(i) for i in parts]
                if bl is None or any(t is None for t in ftabs):
                    ok_data = False
                    break
                rhs_specs.append((parts, bl, ftabs))
        if not ok_data:
            truncated.append(n)
            continue
        residual = {}
        for s, u, bs, fu in lhs_terms:
            if not bs or not fu:
                continue
            idx = _slot_index(fu, u)
            for tup_s, out_s in bs.items():
                for z, cz in out_s.items():
                    for r in range(u):
                        for tup_u, out_u in idx[r].get(z, ()):
                            full = tup_u[:r] + tup_s + tup_u[r + 1:]
                            sgn = src.prefix_sign(full, r)
                            for w, cw in out_u.items():
                                c = fld.mul(cz, cw)
                                if sgn < 0:
                                    c = fld.neg(c)
                                vec_add_into(fld, residual, (full, w), c)
        for parts, bl, ftabs in rhs_specs:
            if any(not t for t in ftabs) or not bl:
                continue
            neg_table = {}
            _accumulate_composite(fld, neg_table, bl, ftabs, parts)
            for tup, out in neg_table.items():
                for z, c in out.items():
                    vec_add_into(fld, residual, (tup, z), fld.neg(c))
        checked.append(n)
        for (tup, z), c in sorted(residual.items()):
            witnesses.append((n, tup, z, c))
            if len(witnesses) >= max_witnesses:
                break
        if len(witnesses) >= max_witnesses:
            break
    return FunctorReport(not witnesses, tuple(checked), tuple(truncated),
                         tuple(witnesses))


def degree_support_bound(cat: AInfCategory, arities, use_strict_units: bool = True):
    """Input-degree tuples not excluded by degree arithmetic.

    For each requested arity n, lists the tuples (d_1, ..., d_n) of unshifted
    degrees, drawn from degrees present in the hom spaces, whose b_n target
    degree sum(d_i) - n + 2 is again present.  When use_strict_units is set
    and a degree's graded piece consists entirely of designated units, slots
    in that degree are excluded (b_{>=3} kills unit tuples).  Object-pair
    bookkeeping is ignored, so this is an upper bound for the support.
    """
    degrees = set()
    unit_only = set()
    unit_labels = set(cat.units.values())
    by_deg = {}
    for basis in cat.hom.values():
        for lab, deg in basis:
            degrees.add(deg)
            by_deg.setdefault(deg, []).append(lab)
    for deg, labs in by_deg.items():
        if labs and all(l in unit_labels for l in labs):
            unit_only.add(deg)
    out = {}
    for n in arities:
        slot = sorted(degrees - unit_only) if (use_strict_units and n >= 3) \
            else sorted(degrees)
        tuples = []
        def rec(k, acc, total):
            if k == n:
                if total - n + 2 in degrees:
                    tuples.append(tuple(acc))
                return
            for d in slot:
                acc.append(d)
                rec(k + 1, acc, total + d)
                acc.pop()
        rec(0, [], 0)
        out[n] = tuple(tuples)
    return out


def restrict_arity(cat: AInfCategory, cap: int) -> AInfCategory:
    ops = {n: t for n, t in cat.ops.items() if n <= cap}
    return replace(cat, ops=ops, arity_cap=cap, complete=cat.complete and
                   all(not t for n, t in cat.ops.items() if n > cap))

"""Minimal models of dg categories by homological transfer.

The contraction data per hom space is a triple (proj, inc, htp) with

    proj . inc = id,   inc . proj = 1 - (b_1 htp + htp b_1),
    htp . htp = 0,     htp . inc = 0,    proj . htp = 0,

built degreewise from the splitting V = B (+) H (+) L where B = im(b_1),
L is spanned by the pivot coordinates of b_1 (so b_1|_L is injective onto
the next B, in matching order), and H completes B to ker(b_1).  With these
side conditions the transferred operations are given by planar trees:

    theta_1 = inc,
    theta_n = htp . sum_{j=1}^{n-1} b_2(theta_j (x) theta_{n-j}),
    btilde_n = proj . (the same sum),

with no Koszul signs since all tree maps have shifted degree 0.

When the input category carries weights (operations add them, outputs above
weight_cap vanish) the splitting is refined weight by weight, the
transferred basis inherits weights, and trees of total weight above the cap
are pruned as exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ainf import (AInfCategory, AInfMorphism, StructureError, vec_add_into)
from .field import FieldCtx
from .sparse import SparseMatrix, rank_kernel_image, rref


@dataclass
class Contraction:
    pair: tuple
    min_basis: tuple   # ((min_label, degree), ...)
    inc: dict          # min_label -> {big_label: coeff}
    proj: dict         # big_label -> {min_label: coeff}
    htp: dict          # big_label -> {big_label: coeff}, degree -1
    weights: dict      # min_label -> weight (empty when unweighted)


def apply_linear(field: FieldCtx, mapping: dict, vec: dict) -> dict:
    out = {}
    for x, c in vec.items():
        for y, cy in mapping.get(x, {}).items():
            vec_add_into(field, out, y, field.mul(c, cy))
    return out


def hom_contraction(cat: AInfCategory, pair, unit_label=None,
                    name_prefix=None) -> Contraction:
    """Deterministic contraction of one hom space onto its b_1-cohomology.

    If unit_label is given (a cycle), it is preferred as the first
    representative in its block, so proj(unit) is a basis vector and
    inc(its class) is the unit itself.
    """
    f = cat.field
    basis = cat.hom.get(pair, ())
    if name_prefix is None:
        name_prefix = "[%s>%s]" % pair
    blocks = {}
    for lab, deg in basis:
        w = cat.weights.get(lab, 0) if cat.weights else 0
        blocks.setdefault((deg, w), []).append(lab)
    pos = {}
    for key, labs in blocks.items():
        for t, lab in enumerate(labs):
            pos[lab] = (key, t)

    mats = {}
    for (deg, w), labs in blocks.items():
        up = blocks.get((deg + 1, w), [])
        m = SparseMatrix(len(up), len(labs), f)
        for c, lab in enumerate(labs):
            for z, cz in cat.b_value((lab,)).items():
                if pos[z][0] != (deg + 1, w):
                    raise StructureError(
                        "differential is not homogeneous at %r" % (lab,))
                m.set(pos[z][1], c, cz)
        mats[(deg, w)] = m

    kern, pivots = {}, {}
    for key, m in mats.items():
        _, k, _, piv = rank_kernel_image(m)
        kern[key] = k
        pivots[key] = piv

    inc, proj, htp = {}, {}, {}
    min_basis, min_weights = [], {}
    counters = {}
    for key in sorted(blocks):
        deg, w = key
        labs = blocks[key]
        n = len(labs)
        if n == 0:
            continue
        below = (deg - 1, w)
        m_in = mats.get(below)
        piv_in = pivots.get(below, [])
        bvecs = [m_in.col(c) for c in piv_in] if m_in is not None else []
        lvecs_cols = list(pivots[key])

        candidates = list(kern[key])
        if unit_label is not None and pos.get(unit_label, (None,))[0] == key:
            candidates = [{pos[unit_label][1]: f.one()}] + candidates
        hreps = _complete(f, bvecs, candidates, n)

        cols = bvecs + hreps + [{c: f.one()} for c in lvecs_cols]
        if len(cols) != n:
            raise StructureError("splitting dimension mismatch at %r" % (key,))
        rows = []
        for t in range(n):
            row = {}
            for j, v in enumerate(cols):
                c = v.get(t)
                if c is not None:
                    row[j] = c
            row[n + t] = f.one()
            rows.append(row)
        piv_cols, reduced = rref(rows, 2 * n, f)
        if list(piv_cols) != list(range(n)):
            raise StructureError("basis matrix is singular at %r" % (key,))
        inv_rows = {piv_cols[i]: reduced[i] for i in range(n)}

        nb = len(bvecs)
        nh = len(hreps)
        mlabels = []
        for j2 in range(nh):
            idx = counters.get(deg, 0)
            counters[deg] = idx + 1
            mlab = "%s%d.%d" % (name_prefix, deg, idx)
            mlabels.append(mlab)
            min_basis.append((mlab, deg))
            if cat.weights:
                min_weights[mlab] = w
            inc[mlab] = {labs[t]: c for t, c in hreps[j2].items()}
        below_labs = blocks.get(below, [])
        for t, lab in enumerate(labs):
            pvec, hvec = {}, {}
            for j in range(nb):
                c = inv_rows[j].get(n + t)
                if c is not None:
                    hvec[below_labs[piv_in[j]]] = c
            for j2 in range(nh):
                c = inv_rows[nb + j2].get(n + t)
                if c is not None:
                    pvec[mlabels[j2]] = c
            if pvec:
                proj[lab] = pvec
            if hvec:
                htp[lab] = hvec
    return Contraction(pair, tuple(min_basis), inc, proj, htp, min_weights)


def _complete(field, base_rows, candidates, ncols):
    """Candidates that enlarge the span of base_rows, in input order."""
    rows = [dict(r) for r in base_rows]
    _, reduced = rref(rows, ncols, field)
    reduced = [dict(r) for r in reduced]
    chosen = []
    for cand in candidates:
        v = dict(cand)
        for r in reduced:
            p = min(r)
            c = v.get(p)
            if c is not None:
                lead = r[p]
                scale = field.div(c, lead)
                for k, rv in r.items():
                    vec_add_into(field, v, k, field.neg(field.mul(scale, rv)))
        if v:
            chosen.append(dict(cand))
            p = min(v)
            lead = v[p]
            v = {k: field.div(c, lead) for k, c in v.items()}
            reduced.append(v)
            reduced.sort(key=min)
    return chosen


def check_contraction(cat: AInfCategory, con: Contraction):
    """Exact verification of all side conditions; returns failures."""
    f = cat.field
    bad = []
    labs = [lab for lab, _ in cat.hom.get(con.pair, ())]
    d = {lab: dict(cat.b_value((lab,))) for lab in labs}

    def compose2(m2, m1):  # m2 . m1 on label-keyed maps
        return {x: apply_linear(f, m2, v) for x, v in m1.items() if v}

    for mlab, _ in con.min_basis:
        got = apply_linear(f, con.proj, con.inc[mlab])
        if got != {mlab: f.one()}:
            bad.append(("proj.inc != id", mlab))
        if apply_linear(f, con.htp, con.inc[mlab]):
            bad.append(("htp.inc != 0", mlab))
    for lab in labs:
        if apply_linear(f, con.htp, con.htp.get(lab, {})):
            bad.append(("htp.htp != 0", lab))
        if apply_linear(f, con.proj, con.htp.get(lab, {})):
            bad.append(("proj.htp != 0", lab))
        acc = {lab: f.one()}
        for z, c in apply_linear(f, d, con.htp.get(lab, {})).items():
            vec_add_into(f, acc, z, f.neg(c))
        for z, c in apply_linear(f, con.htp, d.get(lab, {})).items():
            vec_add_into(f, acc, z, f.neg(c))
        ip = apply_linear(f, con.inc, con.proj.get(lab, {}))
        for z, c in ip.items():
            vec_add_into(f, acc, z, f.neg(c))
        if acc:
            bad.append(("homotopy identity fails", lab))
    return bad


def minimal_model(cat: AInfCategory, arity_cap: int | None = None):
    """Transfer a dg category onto its cohomology.

    Returns (minimal category, inclusion functor, contractions by pair).
    Requires b_n = 0 for n >= 3.  The minimal category has b_1 = 0 and,
    when the input has strict units, strict units induced on cohomology.
    """
    for n, table in cat.ops.items():
        if n >= 3 and table:
            raise StructureError("transfer input must be a dg category")
    cap = arity_cap if arity_cap is not None else cat.arity_cap
    f = cat.field

    from .ainf import check_unitality
    units_strict = bool(cat.units) and \
        check_unitality(cat).verdict == "strict"

    cons = {}
    min_hom = {}
    min_units = {}
    min_weights = {}
    for pair in sorted(cat.hom):
        i, j = pair
        unit = cat.units.get(i) if i == j else None
        con = hom_contraction(cat, pair, unit_label=unit)
        cons[pair] = con
        min_hom[pair] = con.min_basis
        min_weights.update(con.weights)
        if unit is not None and not cat.b_value((unit,)):
            for mlab, _ in con.min_basis:
                if con.inc[mlab] == {unit: f.one()}:
                    min_units[i] = mlab
                    break

    inc_all, proj_all, htp_all = {}, {}, {}
    for con in cons.values():
        inc_all.update(con.inc)
        proj_all.update(con.proj)
        htp_all.update(con.htp)

    unit_set = set(min_units.values())
    wcap = cat.weight_cap if cat.weights else None
    if wcap is not None and any(w < 0 for w in cat.weights.values()):
        wcap = None  # pruning assumes nonnegative weights

    tree_memo = {}

    def tree_sum(tup):
        """sum_j b_2(theta(tup[:j]) (x) theta(tup[j:])), as a big vector."""
        if tup in tree_memo:
            return tree_memo[tup]
        acc = {}
        for split in range(1, len(tup)):
            v = theta(tup[:split])
            w = theta(tup[split:])
            if not v or not w:
                continue
            for x, cx in v.items():
                for y, cy in w.items():
                    val = cat.b_value((x, y))
                    if not val:
                        continue
                    c = f.mul(cx, cy)
                    for z, cz in val.items():
                        vec_add_into(f, acc, z, f.mul(c, cz))
        tree_memo[tup] = acc
        return acc

    theta_memo = {}

    def theta(tup):
        # theta_n = -htp . tree_sum; the sign makes the collection (theta_n)
        # an A-infinity functor from the transferred structure (the n = 2
        # axiom forces it: inc(btilde_2) = b_2(inc (x) inc) - b_1(htp b_2))
        if len(tup) == 1:
            return inc_all[tup[0]]
        if tup in theta_memo:
            return theta_memo[tup]
        if units_strict and any(x in unit_set for x in tup):
            theta_memo[tup] = {}
            return {}
        if wcap is not None and sum(min_weights.get(x, 0) for x in tup) > wcap:
            theta_memo[tup] = {}
            return {}
        res = {z: f.neg(c)
               for z, c in apply_linear(f, htp_all, tree_sum(tup)).items()}
        theta_memo[tup] = res
        return res

    # composability fan-out: labels whose target is a given object
    by_tgt = {}
    info = {}
    for pair, basis in min_hom.items():
        for mlab, deg in basis:
            info[mlab] = pair
            by_tgt.setdefault(pair[1], []).append(mlab)

    min_ops = {1: {}}
    f_comps = {1: {(mlab,): dict(inc_all[mlab]) for mlab in info}}

    def extend(tup, wsum, n):
        """Depth-first enumeration of composable tuples in operator order,
        growing to the right (next element's target = current source)."""
        if len(tup) >= 2:
            skip = units_strict and len(tup) > 2 and \
                any(x in unit_set for x in tup)
            if not skip:
                bt = apply_linear(f, proj_all, tree_sum(tup))
                if bt:
                    min_ops.setdefault(len(tup), {})[tup] = bt
                th = theta(tup)
                if th:
                    f_comps.setdefault(len(tup), {})[tup] = th
        if len(tup) == n:
            return
        src_obj = info[tup[-1]][0]
        for nxt in by_tgt.get(src_obj, ()):
            w2 = wsum + min_weights.get(nxt, 0)
            if wcap is not None and w2 > wcap:
                continue
            extend(tup + (nxt,), w2, n)

    for start in sorted(info):
        extend((start,), min_weights.get(start, 0), cap)

    # drop exactly-zero tables, keep structure of knowns
    min_ops = {n: t for n, t in min_ops.items() if n == 1 or t}
    for n in range(2, cap + 1):
        min_ops.setdefault(n, {})

    complete = False
    if (units_strict and wcap is not None and cat.complete and
            all(min_weights.get(m, 0) >= 1 for m in info
                if m not in unit_set) and cap >= wcap):
        complete = True

    min_cat = AInfCategory(
        objects=cat.objects, hom=min_hom, ops=min_ops, field=f,
        arity_cap=cap, units=min_units, complete=complete,
        weights=min_weights if cat.weights else {},
        weight_cap=wcap)
    functor = AInfMorphism(
        source=min_cat, target=cat,
        object_map={o: o for o in cat.objects},
        components={n: t for n, t in f_comps.items() if t},
        arity_cap=cap, complete=complete)
    return min_cat, functor, cons


def hom_dims(cat: AInfCategory):
    """Dimensions of hom spaces by (pair, degree)."""
    out = {}
    for pair, basis in cat.hom.items():
        dd = {}
        for _, deg in basis:
            dd[deg] = dd.get(deg, 0) + 1
        out[pair] = dd
    return out


def cohomology_dims(cat: AInfCategory, pair=None):
    """b_1-cohomology dimensions by degree, computed directly from ranks
    (dim H^k = dim V^k - rank d^k - rank d^{k-1}); no transfer involved."""
    pairs = [pair] if pair is not None else sorted(cat.hom)
    f = cat.field
    out = {}
    for pr in pairs:
        basis = cat.hom.get(pr, ())
        by_deg = {}
        for lab, deg in basis:
            by_deg.setdefault(deg, []).append(lab)
        pos = {}
        for deg, labs in by_deg.items():
            for t, lab in enumerate(labs):
                pos[lab] = (deg, t)
        ranks = {}
        for deg, labs in by_deg.items():
            up = by_deg.get(deg + 1, [])
            m = SparseMatrix(len(up), len(labs), f)
            for c, lab in enumerate(labs):
                for z, cz in cat.b_value((lab,)).items():
                    m.set(pos[z][1], c, cz)
            r, _, _, _ = rank_kernel_image(m)
            ranks[deg] = r
        dims = {}
        for deg, labs in by_deg.items():
            h = len(labs) - ranks.get(deg, 0) - ranks.get(deg - 1, 0)
            if h:
                dims[deg] = h
        out[pr] = dims
    return out if pair is None else out[pair]

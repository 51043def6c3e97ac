"""Matrix representations of quiver algebras.

A representation assigns to each arrow an exact matrix over a FieldCtx;
everything downstream is exact linear algebra.  The module evaluates
presented relations (additive preprojective relations, and the ordered
multiplicative relation when q-data is supplied), computes moment maps for
doubled quivers, and realizes semisimplification as the associated graded
of the radical filtration of the acting algebra.  Over the rationals the
radical comes from the trace form of the defining module; over a prime
field the same endpoint is reached by an exhaustive Jordan-Hoelder
computation, which doubles as an independent oracle for the
characteristic-zero path.  King (semi)stability is decided exactly over
prime fields by enumerating all invariant subspace tuples.
"""

from __future__ import annotations

import itertools
import random as _random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .field import FieldCtx, QQ
from .quiver import (DGQuiverAlgebra, PresentedAlgebra, Quiver,
                     degree_zero_truncation, dimension_vector, star_name)
from .ratpoly import RatPolynomial, factor_rational_poly
from .sparse import SparseMatrix, rank_kernel_image, solve


class RepError(Exception):
    pass


# ---------------------------------------------------------------------------
# representations

@dataclass
class MatrixRep:
    quiver: Quiver
    d: dict                  # vertex -> dimension
    mats: dict               # arrow name -> SparseMatrix, d[tgt] x d[src]
    field: FieldCtx = QQ

    def __post_init__(self):
        self.d = dimension_vector(self.quiver, self.d)
        names = {a.name for a in self.quiver.arrows}
        extra = set(self.mats) - names
        if extra:
            raise RepError("matrices for unknown arrows %s" % sorted(extra))
        for a in self.quiver.arrows:
            m = self.mats.get(a.name)
            want = (self.d[a.tgt], self.d[a.src])
            if m is None:
                self.mats[a.name] = SparseMatrix(want[0], want[1], self.field)
            elif (m.nrows, m.ncols) != want:
                raise RepError("arrow %r wants shape %s, got %s"
                               % (a.name, want, (m.nrows, m.ncols)))

    def total_dim(self) -> int:
        return sum(self.d.values())

    def offsets(self) -> dict:
        out = {}
        pos = 0
        for v in self.quiver.vertices:
            out[v] = pos
            pos += self.d[v]
        return out


def zero_rep(q: Quiver, d, field: FieldCtx = QQ) -> MatrixRep:
    return MatrixRep(q, d, {}, field)


def random_rep(q: Quiver, seed: int, d=None, field: FieldCtx = QQ,
               max_abs: int = 9, max_total: int = 4) -> MatrixRep:
    """Deterministic random representation; Fraction entries with numerator
    and denominator bounded by max_abs, then mapped into the field."""
    rng = _random.Random(seed)
    if d is None:
        while True:
            d = {v: rng.randint(0, 2) for v in q.vertices}
            if 0 < sum(d.values()) <= max_total:
                break
    d = dimension_vector(q, d)
    mats = {}
    for a in q.arrows:
        m = SparseMatrix(d[a.tgt], d[a.src], field)
        for r in range(m.nrows):
            for c in range(m.ncols):
                if rng.random() < 0.7:
                    if field.p == 0:
                        val = field.of_fraction(
                            Fraction(rng.randint(-max_abs, max_abs),
                                     rng.randint(1, max_abs)))
                    else:
                        val = field.of_int(rng.randint(0, field.p - 1))
                    m.set(r, c, val)
        mats[a.name] = m
    return MatrixRep(q, d, mats, field)


def _eye(n: int, f: FieldCtx) -> SparseMatrix:
    m = SparseMatrix(n, n, f)
    for i in range(n):
        m.set(i, i, f.one())
    return m


def invert_matrix(m: SparseMatrix):
    """Exact inverse, or None when singular."""
    if m.nrows != m.ncols:
        return None
    f = m.field
    n = m.nrows
    rows = m.rows()
    inv = [{i: f.one()} for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not f.is_zero(rows[r].get(col, f.zero())):
                piv = r
                break
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        scale = f.inv(rows[col][col])
        rows[col] = {c: f.mul(scale, v) for c, v in rows[col].items()}
        inv[col] = {c: f.mul(scale, v) for c, v in inv[col].items()}
        for r in range(n):
            if r == col:
                continue
            c0 = rows[r].get(col)
            if c0 is None or f.is_zero(c0):
                continue
            for c, v in rows[col].items():
                s = f.sub(rows[r].get(c, f.zero()), f.mul(c0, v))
                if f.is_zero(s):
                    rows[r].pop(c, None)
                else:
                    rows[r][c] = s
            for c, v in inv[col].items():
                s = f.sub(inv[r].get(c, f.zero()), f.mul(c0, v))
                if f.is_zero(s):
                    inv[r].pop(c, None)
                else:
                    inv[r][c] = s
    return SparseMatrix.from_rows(inv, n, f)


def path_matrix(rep: MatrixRep, path, vertex=None) -> SparseMatrix:
    """Matrix of a path (operator order: path[0] applied last)."""
    if not path:
        if vertex is None:
            raise RepError("trivial path needs a vertex")
        return _eye(rep.d[vertex], rep.field)
    out = rep.mats[path[0]]
    for name in path[1:]:
        out = out.mul(rep.mats[name])
    return out


def conjugate(rep: MatrixRep, g: dict) -> MatrixRep:
    """Change of basis by invertible per-vertex matrices g."""
    gmap, ginv = {}, {}
    for v in rep.quiver.vertices:
        gv = g.get(v)
        if gv is None:
            gv = _eye(rep.d[v], rep.field)
        inv = invert_matrix(gv)
        if inv is None:
            raise RepError("change of basis at %r is singular" % (v,))
        gmap[v] = gv
        ginv[v] = inv
    mats = {}
    for a in rep.quiver.arrows:
        mats[a.name] = gmap[a.tgt].mul(rep.mats[a.name]).mul(ginv[a.src])
    return MatrixRep(rep.quiver, dict(rep.d), mats, rep.field)


# ---------------------------------------------------------------------------
# relations and moment maps

@dataclass
class RelationReport:
    ok: bool
    mode: str                # "additive" | "multiplicative"
    residuals: tuple         # ((vertex, SparseMatrix), ...)


def _require_doubled(rep: MatrixRep):
    names = {a.name for a in rep.quiver.arrows}
    for n in names:
        if star_name(n) not in names:
            raise RepError("quiver is not doubled: %r has no partner" % (n,))


def eval_relations(rep: MatrixRep, alg, q=None) -> RelationReport:
    """Residuals of the algebra relations at the representation.

    alg is a PresentedAlgebra (or a nonpositively graded DGQuiverAlgebra,
    which contributes its degree-0 presentation).  When q is given (a
    vertex -> scalar map), the multiplicative relation is evaluated
    instead: the ordered product of (1 + A A*)^{+-1} per vertex must equal
    q_v; every factor must be invertible.
    """
    if q is not None:
        return _eval_multiplicative(rep, q)
    if isinstance(alg, DGQuiverAlgebra):
        alg = degree_zero_truncation(alg)
    f = rep.field
    residuals = []
    for v, terms in alg.relations:
        acc = SparseMatrix(rep.d[v], rep.d[v], f)
        for coeff, path in terms:
            acc = acc.add(path_matrix(rep, path, v).scale(f.of_fraction(coeff)))
        residuals.append((v, acc))
    ok = all(m.is_zero() for _, m in residuals)
    return RelationReport(ok, "additive", tuple(residuals))


def _eval_multiplicative(rep: MatrixRep, q) -> RelationReport:
    # fixed total order on the doubled arrows: lexicographic by name
    _require_doubled(rep)
    f = rep.field
    qmap = {v: f.of_fraction(Fraction(q.get(v, 1)))
            for v in rep.quiver.vertices}
    residuals = []
    for v in rep.quiver.vertices:
        prod = _eye(rep.d[v], f)
        for a in sorted(rep.quiver.arrows, key=lambda a: a.name):
            if a.tgt != v:
                continue
            factor = _eye(rep.d[v], f).add(
                rep.mats[a.name].mul(rep.mats[star_name(a.name)]))
            inv = invert_matrix(factor)
            if inv is None:
                raise RepError("1 + A A* is singular at arrow %r" % (a.name,))
            prod = prod.mul(factor if not a.name.endswith("*") else inv)
        residuals.append((v, prod.add(_eye(rep.d[v], f).scale(qmap[v]).neg())))
    ok = all(m.is_zero() for _, m in residuals)
    return RelationReport(ok, "multiplicative", tuple(residuals))


def moment_map(rep: MatrixRep) -> dict:
    """Vertex components of sum_a [A_a, A_{a*}] over the unstarred arrows."""
    _require_doubled(rep)
    f = rep.field
    out = {v: SparseMatrix(rep.d[v], rep.d[v], f) for v in rep.quiver.vertices}
    for a in rep.quiver.arrows:
        if a.name.endswith("*"):
            continue
        st = star_name(a.name)
        out[a.tgt] = out[a.tgt].add(rep.mats[a.name].mul(rep.mats[st]))
        out[a.src] = out[a.src].add(rep.mats[st].mul(rep.mats[a.name]).neg())
    return out


# ---------------------------------------------------------------------------
# echelon spans of sparse vectors

class Echelon:
    """Reduced echelon span of sparse vectors keyed by orderable indices.

    The stored basis is canonical for the span (reduced, pivots normalized
    to 1, sorted by pivot), independent of insertion order.
    """

    def __init__(self, f: FieldCtx):
        self.f = f
        self.rows = {}           # pivot key -> vector dict

    def _reduce(self, vec, record=None):
        # stored rows are zero at every pivot but their own, so one pass
        # over the pivot keys present in vec cannot reintroduce a pivot
        f = self.f
        vec = {k: v for k, v in vec.items() if not f.is_zero(v)}
        for piv in sorted(set(vec) & set(self.rows)):
            c = vec.get(piv)
            if c is None or f.is_zero(c):
                continue
            if record is not None:
                record[piv] = f.add(record.get(piv, f.zero()), c)
            for k, v in self.rows[piv].items():
                s = f.sub(vec.get(k, f.zero()), f.mul(c, v))
                if f.is_zero(s):
                    vec.pop(k, None)
                else:
                    vec[k] = s
        return vec, (min(vec) if vec else None)

    def reduce(self, vec) -> dict:
        red, _ = self._reduce(dict(vec))
        return red

    def coefficients(self, vec):
        """Pivot -> coefficient expressing vec over the basis, or None."""
        record = {}
        red, _ = self._reduce(dict(vec), record)
        return None if red else record

    def add(self, vec) -> bool:
        f = self.f
        red, piv = self._reduce(dict(vec))
        if not red:
            return False
        inv = f.inv(red[piv])
        red = {k: f.mul(inv, v) for k, v in red.items()}
        for p, row in self.rows.items():
            c = row.get(piv)
            if c is None or f.is_zero(c):
                continue
            for k, v in red.items():
                s = f.sub(row.get(k, f.zero()), f.mul(c, v))
                if f.is_zero(s):
                    row.pop(k, None)
                else:
                    row[k] = s
        self.rows[piv] = red
        return True

    def basis(self):
        return [dict(self.rows[p]) for p in sorted(self.rows)]

    def dim(self) -> int:
        return len(self.rows)


def _flat_mul(f: FieldCtx, a: dict, b: dict) -> dict:
    by_row = {}
    for (r, c), v in b.items():
        by_row.setdefault(r, []).append((c, v))
    out = {}
    for (r, k), x in a.items():
        for c, y in by_row.get(k, ()):
            key = (r, c)
            s = f.add(out.get(key, f.zero()), f.mul(x, y))
            if f.is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
    return out


def _flat_trace_product(f: FieldCtx, a: dict, b: dict):
    tot = f.zero()
    for (r, c), v in a.items():
        w = b.get((c, r))
        if w is not None:
            tot = f.add(tot, f.mul(v, w))
    return tot


# ---------------------------------------------------------------------------
# the acting algebra and its radical

@dataclass
class ActingAlgebra:
    rep: MatrixRep
    basis: tuple             # flat {(row, col): scalar} dicts, echelon order

    def dim(self) -> int:
        return len(self.basis)


def acting_algebra(rep: MatrixRep) -> ActingAlgebra:
    """Image of the path algebra in End of the total space: the span of
    the vertex idempotents and all arrow products, closed under
    multiplication."""
    f = rep.field
    off = rep.offsets()
    gens = []
    for v in rep.quiver.vertices:
        gens.append({(off[v] + i, off[v] + i): f.one()
                     for i in range(rep.d[v])})
    for a in rep.quiver.arrows:
        m = rep.mats[a.name]
        gens.append({(off[a.tgt] + r, off[a.src] + c): val
                     for (r, c), val in m.entries.items()})
    ech = Echelon(f)
    for g in gens:
        ech.add(g)
    while True:
        grew = False
        for x in list(ech.basis()):
            for g in gens:
                if ech.add(_flat_mul(f, g, x)):
                    grew = True
                if ech.add(_flat_mul(f, x, g)):
                    grew = True
        if not grew:
            break
    return ActingAlgebra(rep, tuple(ech.basis()))


def radical_char0(acting: ActingAlgebra) -> tuple:
    """Echelon basis of the Jacobson radical via the trace form of the
    defining module; exact and complete in characteristic zero."""
    f = acting.rep.field
    if f.p != 0:
        raise RepError("trace-form radical needs characteristic zero; "
                       "use the brute-force path over prime fields")
    basis = acting.basis
    n = len(basis)
    rows = []
    for i in range(n):
        row = {}
        for j in range(n):
            t = _flat_trace_product(f, basis[i], basis[j])
            if not f.is_zero(t):
                row[j] = t
        rows.append(row)
    gram = SparseMatrix.from_rows(rows, n, f)
    kern = rank_kernel_image(gram)[1]
    ech = Echelon(f)
    for kv in kern:
        vec = {}
        for j, c in kv.items():
            for key, v in basis[j].items():
                s = f.add(vec.get(key, f.zero()), f.mul(c, v))
                if f.is_zero(s):
                    vec.pop(key, None)
                else:
                    vec[key] = s
        ech.add(vec)
    return tuple(ech.basis())


@dataclass
class RadicalFiltration:
    rep: MatrixRep
    layers: tuple            # layers[k] = {vertex: [local echelon vectors]}

    def layer_dims(self):
        return tuple({v: len(bs) for v, bs in layer.items()}
                     for layer in self.layers)


def _flat_apply(f: FieldCtx, flat: dict, vec: dict) -> dict:
    out = {}
    for (r, c), a in flat.items():
        x = vec.get(c)
        if x is None:
            continue
        s = f.add(out.get(r, f.zero()), f.mul(a, x))
        if f.is_zero(s):
            out.pop(r, None)
        else:
            out[r] = s
    return out


def radical_filtration(rep: MatrixRep) -> RadicalFiltration:
    """M >= JM >= J^2 M >= ... for J the radical of the acting algebra."""
    f = rep.field
    off = rep.offsets()
    rad = radical_char0(acting_algebra(rep))
    layers = [{v: [{i: f.one()} for i in range(rep.d[v])]
               for v in rep.quiver.vertices}]
    while True:
        cur = layers[-1]
        total = sum(len(bs) for bs in cur.values())
        if total == 0:
            break
        nxt = {}
        for v in rep.quiver.vertices:
            ech = Echelon(f)
            for w in rep.quiver.vertices:
                for vec in cur[w]:
                    gvec = {off[w] + i: x for i, x in vec.items()}
                    for j in rad:
                        img = _flat_apply(f, j, gvec)
                        loc = {r - off[v]: x for r, x in img.items()
                               if off[v] <= r < off[v] + rep.d[v]}
                        if loc:
                            ech.add(loc)
            nxt[v] = ech.basis()
        new_total = sum(len(bs) for bs in nxt.values())
        if new_total == 0:
            if total:
                layers.append(nxt)
            break
        if new_total >= total:
            raise RepError("radical filtration failed to decrease")
        layers.append(nxt)
    if sum(len(bs) for bs in layers[-1].values()) != 0:
        layers.append({v: [] for v in rep.quiver.vertices})
    return RadicalFiltration(rep, tuple(layers))


# ---------------------------------------------------------------------------
# semisimplification

def semisimplify(rep: MatrixRep) -> MatrixRep:
    """Associated graded of the radical filtration, in a deterministic
    adapted basis (layer by layer, echelon order inside each layer).

    Preserves the dimension vector and the Jordan-Hoelder multiset; the
    output's acting algebra has zero radical and a second run returns the
    identical matrices.  Over a prime field the same endpoint is computed
    from the exhaustive Jordan-Hoelder oracle.
    """
    if rep.field.p != 0:
        return ss_bruteforce(rep)
    filt = radical_filtration(rep)
    f = rep.field
    gmats = {}
    groups = {}
    for v in rep.quiver.vertices:
        chosen = []
        sizes = []
        depth = len(filt.layers)
        for k in range(depth - 1):
            # reduce layer k only against layer k+1 (and residuals already
            # taken in this layer): each residual then still lies in F_k,
            # and vectors from distinct layers are independent anyway
            below = Echelon(f)
            for vec in filt.layers[k + 1][v]:
                below.add(vec)
            group = []
            for vec in filt.layers[k][v]:
                red = below.reduce(vec)
                if red:
                    below.add(red)
                    group.append(red)
            chosen.extend(group)
            sizes.append(len(group))
        if sum(sizes) != rep.d[v]:
            raise RepError("adapted basis does not span vertex %r" % (v,))
        g = SparseMatrix(rep.d[v], rep.d[v], f)
        for col, vec in enumerate(chosen):
            for r, x in vec.items():
                g.set(r, col, x)
        gmats[v] = g
        groups[v] = sizes
    ginv = {v: invert_matrix(gmats[v]) for v in rep.quiver.vertices}

    def layer_of(sizes, idx):
        for k, s in enumerate(sizes):
            if idx < s:
                return k
            idx -= s
        raise RepError("index outside adapted basis")

    mats = {}
    for a in rep.quiver.arrows:
        m = ginv[a.tgt].mul(rep.mats[a.name]).mul(gmats[a.src])
        keep = SparseMatrix(m.nrows, m.ncols, f)
        for (r, c), val in m.entries.items():
            if layer_of(groups[a.tgt], r) == layer_of(groups[a.src], c):
                keep.set(r, c, val)
        mats[a.name] = keep
    return MatrixRep(rep.quiver, dict(rep.d), mats, f)


# ---------------------------------------------------------------------------
# subrepresentations, restrictions, quotients

def _echelon_rows(f: FieldCtx, vectors):
    ech = Echelon(f)
    for vec in vectors:
        ech.add(vec)
    return ech


def restrict_rep(rep: MatrixRep, spaces: dict) -> MatrixRep:
    """Subrepresentation on invariant subspaces (echelon bases per vertex)."""
    f = rep.field
    echs = {v: _echelon_rows(f, spaces.get(v, [])) for v in rep.quiver.vertices}
    d = {v: echs[v].dim() for v in rep.quiver.vertices}
    order = {v: sorted(echs[v].rows) for v in rep.quiver.vertices}
    mats = {}
    for a in rep.quiver.arrows:
        m = SparseMatrix(d[a.tgt], d[a.src], f)
        for col, piv in enumerate(order[a.src]):
            img = rep.mats[a.name].matvec(echs[a.src].rows[piv])
            coeffs = echs[a.tgt].coefficients(img)
            if coeffs is None:
                raise RepError("subspaces are not invariant under %r"
                               % (a.name,))
            for p, c in coeffs.items():
                m.set(order[a.tgt].index(p), col, c)
        mats[a.name] = m
    return MatrixRep(rep.quiver, d, mats, f)


def quotient_rep(rep: MatrixRep, spaces: dict) -> MatrixRep:
    """Quotient by invariant subspaces, on the non-pivot coordinates."""
    f = rep.field
    echs = {v: _echelon_rows(f, spaces.get(v, [])) for v in rep.quiver.vertices}
    coords = {v: [i for i in range(rep.d[v]) if i not in echs[v].rows]
              for v in rep.quiver.vertices}
    d = {v: len(coords[v]) for v in rep.quiver.vertices}
    mats = {}
    for a in rep.quiver.arrows:
        m = SparseMatrix(d[a.tgt], d[a.src], f)
        pos = {i: k for k, i in enumerate(coords[a.tgt])}
        for col, i in enumerate(coords[a.src]):
            img = rep.mats[a.name].matvec({i: f.one()})
            red = echs[a.tgt].reduce(img)
            for r, val in red.items():
                if r not in pos:
                    raise RepError("quotient reduction left a pivot entry")
                m.set(pos[r], col, val)
        mats[a.name] = m
    return MatrixRep(rep.quiver, d, mats, f)


def _in_span(ech: Echelon, vec) -> bool:
    return not ech.reduce(vec)


def invariant(rep: MatrixRep, spaces: dict) -> bool:
    f = rep.field
    echs = {v: _echelon_rows(f, spaces.get(v, [])) for v in rep.quiver.vertices}
    for a in rep.quiver.arrows:
        for vec in spaces.get(a.src, []):
            img = rep.mats[a.name].matvec(vec)
            if not _in_span(echs[a.tgt], img):
                return False
    return True


def subspaces_fp(dim: int, p: int):
    """All subspaces of F_p^dim as tuples of reduced echelon rows (dicts),
    ordered by dimension then by encoding."""
    yield ()
    for k in range(1, dim + 1):
        for pivots in itertools.combinations(range(dim), k):
            free = []
            for i, piv in enumerate(pivots):
                for c in range(piv + 1, dim):
                    if c not in pivots:
                        free.append((i, c))
            for vals in itertools.product(range(p), repeat=len(free)):
                rows = [{pivots[i]: 1} for i in range(k)]
                for (i, c), val in zip(free, vals):
                    if val:
                        rows[i][c] = val
                yield tuple(rows)


def _space_key(rows):
    return (len(rows), tuple(tuple(sorted(r.items())) for r in rows))


def invariant_subspace_tuples(rep: MatrixRep):
    """All invariant subspace tuples over a prime field, ordered by total
    dimension then encoding; includes the zero and full tuples."""
    p = rep.field.p
    if p == 0:
        raise RepError("subspace enumeration needs a prime field")
    per_vertex = {v: list(subspaces_fp(rep.d[v], p))
                  for v in rep.quiver.vertices}
    vs = list(rep.quiver.vertices)
    combos = []
    for tup in itertools.product(*(per_vertex[v] for v in vs)):
        spaces = dict(zip(vs, tup))
        total = sum(len(rows) for rows in tup)
        combos.append((total, tuple(_space_key(t) for t in tup), spaces))
    combos.sort(key=lambda t: (t[0], t[1]))
    for total, _, spaces in combos:
        if invariant(rep, spaces):
            yield total, spaces


def jh_bruteforce(rep: MatrixRep, bound: int = 6) -> list:
    """Jordan-Hoelder factors by exhaustive minimal-submodule search."""
    if rep.field.p == 0:
        raise RepError("the exhaustive oracle needs a prime field")
    if rep.total_dim() > bound:
        raise RepError("total dimension %d exceeds bound %d"
                       % (rep.total_dim(), bound))
    if rep.total_dim() == 0:
        return []
    for total, spaces in invariant_subspace_tuples(rep):
        if total == 0:
            continue
        sub = restrict_rep(rep, spaces)
        if total == rep.total_dim():
            return [sub]
        return [sub] + jh_bruteforce(quotient_rep(rep, spaces), bound)
    raise RepError("no invariant subspace found")


def _rep_sort_key(rep: MatrixRep):
    dims = tuple(rep.d[v] for v in rep.quiver.vertices)
    ents = tuple(sorted((a.name, r, c, int(v))
                        for a in rep.quiver.arrows
                        for (r, c), v in rep.mats[a.name].entries.items()))
    return (rep.total_dim(), dims, ents)


def direct_sum(reps, quiver: Quiver, field: FieldCtx) -> MatrixRep:
    d = {v: sum(r.d[v] for r in reps) for v in quiver.vertices}
    mats = {}
    for a in quiver.arrows:
        m = SparseMatrix(d[a.tgt], d[a.src], field)
        ro = co = 0
        for r in reps:
            for (i, j), v in r.mats[a.name].entries.items():
                m.set(ro + i, co + j, v)
            ro += r.d[a.tgt]
            co += r.d[a.src]
        mats[a.name] = m
    return MatrixRep(quiver, d, mats, field)


def ss_bruteforce(rep: MatrixRep, bound: int = 6) -> MatrixRep:
    """Direct sum of the Jordan-Hoelder factors in canonical order."""
    factors = jh_bruteforce(rep, bound)
    factors.sort(key=_rep_sort_key)
    return direct_sum(factors, rep.quiver, rep.field)


def good_reduction(rep: MatrixRep, p: int):
    """(reduced rep, "ok"), or (None, reason) when p divides a denominator
    or collapses the rank of an arrow matrix."""
    if rep.field.p != 0:
        raise RepError("reduction starts from a rational representation")
    fp = FieldCtx(p)
    mats = {}
    for a in rep.quiver.arrows:
        m = rep.mats[a.name]
        red = SparseMatrix(m.nrows, m.ncols, fp)
        for (r, c), v in m.entries.items():
            if v.denominator % p == 0:
                return None, "denominator of %r entry divisible by %d" % (a.name, p)
            red.set(r, c, fp.of_fraction(v))
        if rank_kernel_image(red)[0] != rank_kernel_image(m)[0]:
            return None, "rank of %r collapses mod %d" % (a.name, p)
        mats[a.name] = red
    return MatrixRep(rep.quiver, dict(rep.d), mats, fp), "ok"


# ---------------------------------------------------------------------------
# homs and isotypic decomposition

def hom_space(r1: MatrixRep, r2: MatrixRep) -> list:
    """Echelon basis of intertwiners r1 -> r2 as {vertex: SparseMatrix}."""
    if r1.quiver is not r2.quiver and r1.quiver != r2.quiver:
        raise RepError("intertwiners need a common quiver")
    f = r1.field
    cols = {}
    for v in r1.quiver.vertices:
        for r in range(r2.d[v]):
            for c in range(r1.d[v]):
                cols[(v, r, c)] = len(cols)
    rows = []
    for a in r1.quiver.arrows:
        for r in range(r2.d[a.tgt]):
            for c in range(r1.d[a.src]):
                row = {}
                for (i, j), val in r1.mats[a.name].entries.items():
                    if j == c:
                        key = cols[(a.tgt, r, i)]
                        row[key] = f.add(row.get(key, f.zero()), val)
                for (i, j), val in r2.mats[a.name].entries.items():
                    if i == r:
                        key = cols[(a.src, j, c)]
                        row[key] = f.sub(row.get(key, f.zero()), val)
                row = {k: v for k, v in row.items() if not f.is_zero(v)}
                if row:
                    rows.append(row)
    if not rows:
        kern = [{i: f.one()} for i in range(len(cols))]
    else:
        kern = rank_kernel_image(SparseMatrix.from_rows(rows, len(cols), f))[1]
    index = {i: key for key, i in cols.items()}
    out = []
    for kv in kern:
        blocks = {v: SparseMatrix(r2.d[v], r1.d[v], f)
                  for v in r1.quiver.vertices}
        for i, val in kv.items():
            v, r, c = index[i]
            blocks[v].set(r, c, val)
        out.append(blocks)
    return out


def _block_minpoly(rep: MatrixRep, blocks: dict) -> RatPolynomial:
    """Minimal polynomial of a per-vertex block endomorphism, via the first
    linear dependence among its flattened powers."""
    f = rep.field
    if f.p != 0:
        raise RepError("minimal polynomials are computed over the rationals")
    off = rep.offsets()
    flat = {}
    for v, m in blocks.items():
        for (r, c), val in m.entries.items():
            flat[(off[v] + r, off[v] + c)] = val
    n = rep.total_dim()
    power = {(i, i): f.one() for i in range(n)}
    powers = [power]
    while True:
        power = _flat_mul(f, powers[-1], flat)
        m = len(powers)
        cols = SparseMatrix(n * n, m, f)
        for k, pw in enumerate(powers):
            for (r, c), val in pw.items():
                cols.set(r * n + c, k, val)
        rhs = {r * n + c: val for (r, c), val in power.items()}
        sol = solve(cols, rhs)
        if sol is not None:
            coeffs = [-sol.get(k, f.zero()) for k in range(m)] + [Fraction(1)]
            return RatPolynomial.of([Fraction(c) for c in coeffs])
        powers.append(power)


def _apply_poly(rep: MatrixRep, blocks: dict, poly: RatPolynomial) -> dict:
    f = rep.field
    out = {}
    for v, m in blocks.items():
        n = rep.d[v]
        acc = SparseMatrix(n, n, f)
        for k in range(poly.degree, -1, -1):
            acc = acc.mul(m) if k < poly.degree else acc
            c = f.of_fraction(poly.coeff(k))
            acc = acc.add(_eye(n, f).scale(c))
        out[v] = acc
    return out


@dataclass
class IsotypicBlock:
    simple: MatrixRep
    multiplicity: int
    endo_dim: int
    status: str              # "split" | "galois" | "undecided"
    min_poly: RatPolynomial = None


def _split_candidates(basis):
    for b in basis:
        yield b
    for i, b1 in enumerate(basis):
        for b2 in basis[i + 1:]:
            yield _blocks_combine(b1, b2, 1)
            yield _blocks_combine(b1, b2, -1)
            yield _blocks_mul(b1, b2)


def _blocks_combine(b1, b2, c):
    out = {}
    for v in b1:
        out[v] = b1[v].add(b2[v].scale(b1[v].field.of_int(c)))
    return out


def _blocks_mul(b1, b2):
    return {v: b1[v].mul(b2[v]) for v in b1}


def _decompose_semisimple(rep: MatrixRep) -> list:
    """Split a semisimple rational rep into simple pieces, honestly: each
    piece carries a status telling whether it was fully split over the
    rationals, is simple with a genuine field of endomorphisms (galois),
    or resisted the deterministic idempotent search (undecided)."""
    if rep.total_dim() == 0:
        return []
    comm = hom_space(rep, rep)
    if len(comm) == 1:
        return [(rep, "split", None, 1)]
    for cand in _split_candidates(comm):
        mp = _block_minpoly(rep, cand)
        if mp.degree < 1:
            continue
        _, factors = factor_rational_poly(mp)
        if len(factors) == 1 and factors[0][1] == 1:
            continue
        g = factors[0][0]
        proj = _apply_poly(rep, cand, g)
        spaces = {}
        for v in rep.quiver.vertices:
            kern = rank_kernel_image(proj[v])[1]
            spaces[v] = kern
        total = sum(len(s) for s in spaces.values())
        if total == 0 or total == rep.total_dim():
            continue
        sub = restrict_rep(rep, spaces)
        quo = quotient_rep(rep, spaces)
        return _decompose_semisimple(sub) + _decompose_semisimple(quo)
    # no rational split: field of endomorphisms, or an undecided block
    center = _commutant_center(rep, comm)
    for cand in center:
        mp = _block_minpoly(rep, cand)
        if mp.degree == len(comm):
            _, factors = factor_rational_poly(mp)
            if len(factors) == 1 and factors[0][1] == 1:
                return [(rep, "galois", factors[0][0], len(comm))]
    return [(rep, "undecided", None, len(comm))]


def _commutant_center(rep: MatrixRep, comm) -> list:
    """Central elements of the commutant, as candidate field generators:
    basis elements plus small combinations, filtered by centrality."""
    f = rep.field
    out = []
    cands = list(comm)
    for i, b1 in enumerate(comm):
        for b2 in comm[i + 1:]:
            cands.append(_blocks_combine(b1, b2, 1))
            cands.append(_blocks_combine(b1, b2, 2))
    for cand in cands:
        if all(_blocks_equal(_blocks_mul(cand, b), _blocks_mul(b, cand))
               for b in comm):
            out.append(cand)
    return out


def _blocks_equal(b1, b2) -> bool:
    return all(b1[v].add(b2[v].neg()).is_zero() for v in b1)


def isotypic_decompose(rep: MatrixRep) -> list:
    """Isotypic pieces of a semisimple representation with multiplicities.

    Requires zero radical.  Pieces whose splitting would need a proper
    field extension are reported as galois blocks with their minimal
    polynomial rather than silently mis-split.
    """
    f = rep.field
    if f.p != 0:
        # socle count: dim Hom(ss, M) = dim Hom(ss, soc M) reaches
        # dim End(ss) exactly when soc M carries the full multiplicity
        # of every simple, which forces soc M = M
        ss = ss_bruteforce(rep)
        if len(hom_space(ss, rep)) != len(hom_space(ss, ss)):
            raise RepError("isotypic decomposition needs zero radical")
        pieces = [(s, "split", None, None) for s in jh_bruteforce(rep)]
    else:
        if radical_char0(acting_algebra(rep)):
            raise RepError("isotypic decomposition needs zero radical")
        pieces = _decompose_semisimple(rep)
    blocks = []
    for piece, status, mp, endo in pieces:
        matched = False
        for blk in blocks:
            if blk.status == "undecided" or status == "undecided":
                continue
            if blk.simple.total_dim() != piece.total_dim():
                continue
            if hom_space(piece, blk.simple):
                blk.multiplicity += 1
                matched = True
                break
        if not matched:
            endo_dim = endo if endo is not None else len(hom_space(piece, piece))
            blocks.append(IsotypicBlock(piece, 1, endo_dim, status, mp))
    total = sum(b.multiplicity * b.simple.total_dim() for b in blocks)
    if total != rep.total_dim():
        raise RepError("isotypic pieces do not add up")
    return blocks


# ---------------------------------------------------------------------------
# stability

@dataclass
class StabilityParam:
    zeta: dict               # vertex -> Fraction

    @classmethod
    def of(cls, q: Quiver, values) -> "StabilityParam":
        if isinstance(values, dict):
            z = {v: Fraction(values.get(v, 0)) for v in q.vertices}
        else:
            vals = list(values)
            if len(vals) != len(q.vertices):
                raise RepError("stability parameter length mismatch")
            z = {v: Fraction(x) for v, x in zip(q.vertices, vals)}
        return cls(z)


def slope(d: dict, zeta) -> Fraction:
    zmap = zeta.zeta if isinstance(zeta, StabilityParam) else zeta
    total = sum(d.values())
    if total == 0:
        raise RepError("slope of the zero dimension vector")
    num = sum(Fraction(zmap.get(v, 0)) * n for v, n in d.items())
    return Fraction(num, total)


@dataclass
class StabilityReport:
    verdict: str             # "stable" | "semistable" | "unstable"
    slope: Fraction
    destabilizer: dict = None    # {vertex: echelon rows} when unstable
    destabilizer_dims: dict = None


def semistable_bruteforce(rep: MatrixRep, zeta,
                          bound: int = 6) -> StabilityReport:
    """Exact King (semi)stability over a prime field by enumerating every
    invariant subspace tuple; unstable verdicts carry a maximal-slope
    destabilizer."""
    if rep.field.p == 0:
        raise RepError("the brute-force stability check needs a prime field")
    if rep.total_dim() > bound:
        raise RepError("total dimension %d exceeds bound %d"
                       % (rep.total_dim(), bound))
    mu = slope(rep.d, zeta)
    tight = False
    worst = None
    for total, spaces in invariant_subspace_tuples(rep):
        if total == 0 or total == rep.total_dim():
            continue
        sd = {v: len(spaces[v]) for v in rep.quiver.vertices}
        s = slope(sd, zeta)
        if s > mu:
            key = (-s, total, tuple(_space_key(spaces[v])
                                    for v in rep.quiver.vertices))
            if worst is None or key < worst[0]:
                worst = (key, spaces, sd)
        elif s == mu:
            tight = True
    if worst is not None:
        _, spaces, sd = worst
        return StabilityReport("unstable", mu, spaces, sd)
    return StabilityReport("semistable" if tight else "stable", mu)

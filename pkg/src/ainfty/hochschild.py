"""Length-windowed Hochschild and cyclic complexes of a finite dg category.

Chains of length n are tuples (a_1, ..., a_n) of hom-basis labels in
operator order (src(a_k) = tgt(a_{k+1})) closing up cyclically
(src(a_n) = tgt(a_1)).  The total degree is sum |a_k| - n + 1: every tensor
factor is shifted and the whole chain is shifted back once, which makes the
length-1 convention (plain endomorphism spaces) the n = 1 case of the same
formula rather than a special seam.

The differential is b = b_1 + d_Hoch where d_Hoch contracts adjacent pairs
with b_2 plus one wraparound term through the cyclic permutation F_n; all
signs are Koszul on the shifted factor degrees.  b never raises length, so
a window of lengths 1..N is a subcomplex and the reported homology is exact
for the window; the stability flag records whether growing the window moves
the reported part.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .ainf import AInfCategory, check_relations
from .ncword import NCContext, canonical_cyclic
from .sparse import SparseMatrix, rank_kernel_image


class HochschildError(Exception):
    pass


def shifted_degree(cat: AInfCategory, lab: str) -> int:
    return cat.deg(lab) - 1


def chain_degree(cat: AInfCategory, tup) -> int:
    return sum(cat.deg(lab) for lab in tup) - len(tup) + 1


def chain_composable(cat: AInfCategory, tup) -> bool:
    n = len(tup)
    return all(cat.src(tup[k]) == cat.tgt(tup[(k + 1) % n]) for k in range(n))


@dataclass
class HochschildChainWindow:
    cat: AInfCategory
    max_length: int
    _bases: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.max_length < 1:
            raise HochschildError("window needs max_length >= 1")
        higher = [n for n in self.cat.known_arities()
                  if n >= 3 and self.cat.op_table(n)]
        if higher:
            raise HochschildError(
                "the windowed complex implements the dg differential; "
                "input has operations of arity %s" % higher)

    def labels(self):
        for pair, basis in sorted(self.cat.hom.items()):
            for lab, _ in basis:
                yield lab

    def basis(self, n: int):
        """All cyclically composable chains of length n, sorted."""
        if n < 1 or n > self.max_length:
            raise HochschildError("length %d outside window 1..%d"
                                  % (n, self.max_length))
        if n not in self._bases:
            cat = self.cat
            out = []
            partial = [()]
            for k in range(n):
                nxt = []
                for tup in partial:
                    for lab in self.labels():
                        if tup and cat.src(tup[-1]) != cat.tgt(lab):
                            continue
                        nxt.append(tup + (lab,))
                partial = nxt
            for tup in partial:
                if cat.src(tup[-1]) == cat.tgt(tup[0]):
                    out.append(tup)
            self._bases[n] = sorted(out)
        return self._bases[n]

    def basis_by_degree(self, n: int):
        by_deg = {}
        for tup in self.basis(n):
            by_deg.setdefault(chain_degree(self.cat, tup), []).append(tup)
        return by_deg

    def check_chain(self, chain: dict) -> None:
        for tup in chain:
            if not 1 <= len(tup) <= self.max_length:
                raise HochschildError("chain length %d outside window"
                                      % len(tup))
            if not chain_composable(self.cat, tup):
                raise HochschildError("chain %s not cyclically composable"
                                      % (tup,))


def _add(field, acc, key, coeff):
    if field.is_zero(coeff):
        return
    new = field.add(acc.get(key, field.of_int(0)), coeff)
    if field.is_zero(new):
        acc.pop(key, None)
    else:
        acc[key] = new


def cyclic_permute(window: HochschildChainWindow, tup):
    """F_n: move the last tensor factor to the front, with its Koszul sign."""
    cat = window.cat
    last = tup[-1]
    rest = sum(shifted_degree(cat, lab) for lab in tup[:-1])
    sign = -1 if (shifted_degree(cat, last) * rest) % 2 else 1
    return (last,) + tup[:-1], sign


def hochschild_b(window: HochschildChainWindow, chain: dict) -> dict:
    """b = b_1 + d_Hoch; lowers length by at most one."""
    window.check_chain(chain)
    cat = window.cat
    f = cat.field
    b1 = cat.op_table(1) or {}
    b2 = cat.op_table(2) or {}
    acc = {}
    for tup, coeff in chain.items():
        n = len(tup)
        sdeg = [shifted_degree(cat, lab) for lab in tup]
        # b_1 on every factor
        pre = 0
        for k in range(n):
            out = b1.get((tup[k],))
            if out:
                sgn = f.of_int(-1 if pre % 2 else 1)
                for z, c in out.items():
                    new = tup[:k] + (z,) + tup[k + 1:]
                    _add(f, acc, new, f.mul(coeff, f.mul(sgn, c)))
            pre += sdeg[k]
        if n == 1:
            continue
        # adjacent contractions
        pre = 0
        for r in range(n - 1):
            out = b2.get((tup[r], tup[r + 1]))
            if out:
                sgn = f.of_int(-1 if pre % 2 else 1)
                for z, c in out.items():
                    new = tup[:r] + (z,) + tup[r + 2:]
                    _add(f, acc, new, f.mul(coeff, f.mul(sgn, c)))
            pre += sdeg[r]
        # wraparound through the cyclic permutation
        rot, rsign = cyclic_permute(window, tup)
        out = b2.get((rot[0], rot[1]))
        if out:
            sgn = f.of_int(rsign)
            for z, c in out.items():
                new = (z,) + rot[2:]
                _add(f, acc, new, f.mul(coeff, f.mul(sgn, c)))
    return acc


def connes_B(window: HochschildChainWindow, chain: dict) -> dict:
    """Connes operator B = (1 - F)(eta (x) -)N; raises length by 1.

    N averages over all rotations of the chain, eta inserts the unit of the
    matching object in front, and the extra rotation of the widened chain
    enters with a minus sign; B^2 = bB + Bb = 0 pins the sign.
    """
    window.check_chain(chain)
    cat = window.cat
    f = cat.field
    if set(cat.units) != set(cat.objects):
        raise HochschildError("Connes operator needs designated units")
    acc = {}
    for tup, coeff in chain.items():
        n = len(tup)
        if n + 1 > window.max_length:
            raise HochschildError(
                "insufficient window: length %d chain needs max_length >= %d"
                % (n, n + 1))
        rot, rsign = tup, 1
        for _ in range(n):
            nxt, s = cyclic_permute(window, rot)
            rot, rsign = nxt, rsign * s
            unit = cat.units[cat.tgt(rot[0])]
            widened = (unit,) + rot
            _add(f, acc, widened, f.mul(coeff, f.of_int(rsign)))
            rot2, s2 = cyclic_permute(window, widened)
            _add(f, acc, rot2, f.mul(coeff, f.of_int(-rsign * s2)))
    return acc


# ---------------------------------------------------------------------------
# the cyclic quotient

def _dual_config(tup):
    return tuple((lab, 0) for lab in reversed(tup))


def _config_chain(cfg):
    return tuple(lab for lab, _ in reversed(cfg))


@dataclass
class CyclicQuotient:
    """coker(1 - F) with the induced differential.

    Classes are canonicalized through the shared cyclic-word machinery: a
    chain maps to the dual configuration read backwards, whose rotation
    signs are the F_n signs mod 2.  Chains whose orbit is sign-conflicted
    represent zero and are dropped.
    """
    window: HochschildChainWindow
    ctx: NCContext = None

    def __post_init__(self):
        if self.ctx is None:
            self.ctx = NCContext.from_category(self.window.cat)

    def push_tuple(self, tup):
        """Canonical (tuple, sign) for one chain, or None when the class is 0."""
        got = canonical_cyclic(self.ctx, _dual_config(tup))
        if got is None:
            return None
        cfg, sign = got
        return _config_chain(cfg), sign

    def push(self, chain: dict) -> dict:
        f = self.window.cat.field
        acc = {}
        for tup, coeff in chain.items():
            got = self.push_tuple(tup)
            if got is None:
                continue
            key, sign = got
            _add(f, acc, key, f.mul(coeff, f.of_int(sign)))
        return acc

    def basis(self, n: int):
        reps = []
        seen = set()
        for tup in self.window.basis(n):
            got = self.push_tuple(tup)
            if got is None:
                continue
            key, _ = got
            if key not in seen:
                seen.add(key)
                reps.append(key)
        return sorted(reps)

    def b(self, chain: dict) -> dict:
        return self.push(hochschild_b(self.window, chain))


def cyclic_quotient(window: HochschildChainWindow) -> CyclicQuotient:
    return CyclicQuotient(window)


# ---------------------------------------------------------------------------
# windowed homology

@dataclass
class WindowedHomology:
    max_length: int
    margin: int
    dims: dict              # (length, degree) -> dim of the length-graded piece
    by_degree: dict         # degree -> total dim over reported lengths
    stable: bool            # True when window growth leaves the report fixed
    cyclic: bool = False


def _assemble_b(window, degrees=None):
    """Block matrices of b per total degree, over all window lengths."""
    cat = window.cat
    f = cat.field
    spaces = {}
    for n in range(1, window.max_length + 1):
        for deg, tups in window.basis_by_degree(n).items():
            spaces.setdefault(deg, []).extend(tups)
    index = {deg: {tup: i for i, tup in enumerate(sorted(tups, key=_len_first))}
             for deg, tups in spaces.items()}
    mats = {}
    for deg, idx in index.items():
        tgt = index.get(deg + 1, {})
        m = SparseMatrix(len(tgt), len(idx), f)
        for tup, col in idx.items():
            img = hochschild_b(window, {tup: f.of_int(1)})
            for out, c in img.items():
                if out in tgt:
                    m.set(tgt[out], col, c)
                elif chain_degree(cat, out) != deg + 1:
                    raise HochschildError("differential is not degree 1")
        mats[deg] = m
    return index, mats


def _len_first(tup):
    return (len(tup), tup)


def windowed_homology(window: HochschildChainWindow, length_margin: int = 1,
                      _check: bool = True) -> WindowedHomology:
    """Homology of the window subcomplex, refined by the length filtration.

    Reported lengths stop at max_length - length_margin.  Each (length,
    degree) entry is the graded dimension F_n H / F_{n-1} H for the
    filtration by chain length; summing over lengths gives the homology of
    the window complex in that degree.
    """
    if length_margin < 1:
        raise HochschildError("length_margin must be >= 1")
    cat = window.cat
    if _check:
        rep = check_relations(cat)
        if not rep.ok:
            raise HochschildError("input category fails its structure "
                                  "relations: %s" % (rep.witnesses[:2],))
    dims = _graded_dims(window, length_margin)
    by_degree = {}
    for (_cap, deg), d in dims.items():
        by_degree[deg] = by_degree.get(deg, 0) + d
    # the report only covers lengths <= max_length - margin, so growing the
    # window (and the margin with it) must reproduce it when the cutoff is
    # honest; a disagreement flags boundary contamination
    bigger = HochschildChainWindow(cat, window.max_length + 1)
    stable = _graded_dims(bigger, length_margin + 1) == dims
    return WindowedHomology(window.max_length, length_margin, dims,
                            by_degree, stable)


def _graded_dims(window, length_margin):
    f = window.cat.field
    index, mats = _assemble_b(window)
    report_cap = window.max_length - length_margin
    dims = {}
    for deg, idx in sorted(index.items()):
        m = mats[deg]
        prev = mats.get(deg - 1)
        boundary_cols = []
        if prev is not None and prev.nrows:
            boundary_cols = rank_kernel_image(prev)[2]
        # kernel of b restricted to lengths <= n, for each cutoff n
        last = 0
        for cap in range(1, report_cap + 1):
            cols = [i for tup, i in idx.items() if len(tup) <= cap]
            if not cols:
                continue
            sub = m.take_columns(cols)
            kern = rank_kernel_image(sub)[1]
            cycle_vecs = []
            for kv in kern:
                vec = {}
                for pos, c in kv.items():
                    vec[cols[pos]] = c
                cycle_vecs.append(vec)
            dim_fn = _span_dim_mod(f, cycle_vecs, boundary_cols, len(idx))
            if dim_fn - last:
                dims[(cap, deg)] = dim_fn - last
            last = dim_fn
    return dims


def _span_dim_mod(f, vecs, modulus_vecs, dim):
    """dim of span(vecs + modulus) - dim span(modulus)."""
    if not vecs and not modulus_vecs:
        return 0
    rows = [dict(v) for v in modulus_vecs]
    base = SparseMatrix.from_rows(rows, dim, f)
    base_rank = rank_kernel_image(base)[0] if rows else 0
    allrows = rows + [dict(v) for v in vecs]
    full = SparseMatrix.from_rows(allrows, dim, f)
    return rank_kernel_image(full)[0] - base_rank


def hh0_dimension(window: HochschildChainWindow) -> int:
    """Degree-0 windowed homology total; for ordinary algebras this is
    dim A / [A, A] once the window is long enough to be stable."""
    rep = windowed_homology(window)
    return rep.by_degree.get(0, 0)

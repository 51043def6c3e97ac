"""Local models at spherical collections.

Given a minimal category whose Ext profile matches a collection of genus-g
curve classes (diagonal (1, 2g, 1), off-diagonal concentrated in degree 1),
this module extracts the halved Ext quiver, presents the degree-one
Maurer-Cartan locus as explicit matrix equations, compares Euler forms,
and enumerates Harder-Narasimhan types of fixed Hilbert polynomial.

Conventions:

* MC coordinates live in the duals of degree-1 morphisms.  A degree-1
  basis label x with source i and target j contributes a d_j x d_i block
  of scalar variables (label, row, col); the matrix acts k^{d_i} -> k^{d_j}.
* Polynomials in those variables are dicts {monomial: coefficient} with
  commutative monomials stored as sorted tuples of variable ids.  In the
  degree >= 1 model all coordinates are even (symmetric-algebra degree 0),
  so no Koszul signs enter monomial reordering.
* The differential sends the dual of a degree-2 basis element z to the sum
  over stored operations of coeff(tuple -> z) times the product, in operator
  order, of the variable matrices of the inputs.  Only all-degree-1 input
  tuples contribute by degree count.  Duals of degree-1 elements map to zero.
* Hilbert polynomials use the calibration where the reduced polynomial of
  P has leading term t^d / d!.  Reduced polynomials are compared
  lexicographically from the top coefficient down.
"""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .field import FieldCtx, QQ
from .sparse import SparseMatrix
from .quiver import Quiver, Arrow, euler_form
from .ratpoly import RatPolynomial
from .ainf import AInfCategory


class LocalModelError(Exception):
    pass


# ---------------------------------------------------------------------------
# spherical-collection certificates


@dataclass(frozen=True)
class SigmaCertificate:
    """Outcome of the Ext-profile check for a collection of curve classes.

    ext_dims records dim Ext^n(i, j) for every nonzero graded piece; genus
    holds the diagonal genus g_i when the profile passes.
    """

    objects: tuple
    ext_dims: dict
    genus: dict
    verdict: bool
    failures: tuple = ()

    def ext(self, i, j, n):
        return self.ext_dims.get((i, j, n), 0)


def verify_sigma(cat: AInfCategory) -> SigmaCertificate:
    """Check that a minimal category has the Ext profile of a collection of
    smooth curve classes on a surface: diagonal (1, 2g_i, 1) in degrees
    0, 1, 2 and off-diagonal morphisms only in degree 1, with symmetric
    degree-1 dimensions between each pair of objects."""
    objects = tuple(cat.objects)
    ext_dims = {}
    for (i, j), basis in cat.hom.items():
        for _, deg in basis:
            key = (i, j, deg)
            ext_dims[key] = ext_dims.get(key, 0) + 1

    failures = []
    genus = {}
    for i in objects:
        d0 = ext_dims.get((i, i, 0), 0)
        d1 = ext_dims.get((i, i, 1), 0)
        d2 = ext_dims.get((i, i, 2), 0)
        if d0 != 1 or d2 != 1:
            failures.append("object %r: diagonal degrees (0, 2) have dims (%d, %d), want (1, 1)" % (i, d0, d2))
        if d1 % 2 != 0:
            failures.append("object %r: odd self-Ext^1 dimension %d" % (i, d1))
        else:
            genus[i] = d1 // 2
        for (a, b, n), dim in ext_dims.items():
            if a == i and b == i and n not in (0, 1, 2) and dim:
                failures.append("object %r: nonzero Ext^%d on the diagonal" % (i, n))
    for (a, b, n), dim in ext_dims.items():
        if a == b or not dim:
            continue
        if n != 1:
            failures.append("pair (%r, %r): nonzero Ext^%d off the diagonal" % (a, b, n))
    for ia, i in enumerate(objects):
        for j in objects[ia + 1:]:
            fwd = ext_dims.get((i, j, 1), 0)
            bwd = ext_dims.get((j, i, 1), 0)
            if fwd != bwd:
                failures.append("pair (%r, %r): Ext^1 dims %d vs %d are not symmetric" % (i, j, fwd, bwd))

    verdict = not failures
    if not verdict:
        genus = {}
    return SigmaCertificate(objects=objects, ext_dims=ext_dims, genus=genus,
                            verdict=verdict, failures=tuple(failures))


def _arrow_names():
    for ch in string.ascii_lowercase:
        yield ch
    k = 1
    while True:
        for ch in string.ascii_lowercase:
            yield "%s%d" % (ch, k)
        k += 1


def ext_quiver_halve(cert: SigmaCertificate) -> Quiver:
    """Extract the halved Ext quiver of a passing certificate: g_i loops at
    each vertex, and each symmetric off-diagonal Ext^1 pair split evenly
    between the two directions (odd remainder goes with the earlier object).

    The split direction is a convention; either choice yields isomorphic
    preprojective data, so we fix the deterministic one."""
    if not cert.verdict:
        raise LocalModelError("not 2CY-consistent: %s" % ("; ".join(cert.failures) or "certificate fails"))
    names = _arrow_names()
    arrows = []
    for i in cert.objects:
        for _ in range(cert.genus[i]):
            arrows.append(Arrow(next(names), str(i), str(i)))
    for ia, i in enumerate(cert.objects):
        for j in cert.objects[ia + 1:]:
            m = cert.ext(i, j, 1)
            fwd = (m + 1) // 2
            for _ in range(fwd):
                arrows.append(Arrow(next(names), str(i), str(j)))
            for _ in range(m - fwd):
                arrows.append(Arrow(next(names), str(j), str(i)))
    return Quiver(vertices=tuple(str(i) for i in cert.objects), arrows=tuple(arrows))


# ---------------------------------------------------------------------------
# polynomial scraps: dict {sorted tuple of variable ids: coefficient}


def poly_add(a, b, f: FieldCtx):
    out = dict(a)
    for mono, c in b.items():
        s = f.add(out.get(mono, f.zero()), c)
        if f.is_zero(s):
            out.pop(mono, None)
        else:
            out[mono] = s
    return out


def poly_scale(a, c, f: FieldCtx):
    if f.is_zero(c):
        return {}
    return {mono: f.mul(c, v) for mono, v in a.items()}


def poly_mul(a, b, f: FieldCtx):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            mono = tuple(sorted(m1 + m2))
            s = f.add(out.get(mono, f.zero()), f.mul(c1, c2))
            if f.is_zero(s):
                out.pop(mono, None)
            else:
                out[mono] = s
    return out


def poly_eval(a, values, f: FieldCtx, coeff_field: FieldCtx = QQ):
    """Evaluate at a point.  Coefficients living in a characteristic-zero
    field are pushed into f via of_fraction before combining."""
    total = f.zero()
    for mono, c in a.items():
        if coeff_field.p == 0 and f.p != 0:
            c = f.of_fraction(Fraction(c))
        term = c
        for var in mono:
            term = f.mul(term, values[var])
        total = f.add(total, term)
    return total


def _poly_sort_key(mono):
    return (len(mono), mono)


def poly_str(a, f: FieldCtx) -> str:
    if not a:
        return "0"
    parts = []
    for mono in sorted(a, key=_poly_sort_key):
        c = a[mono]
        vars_txt = "*".join("%s[%d,%d]" % v for v in mono)
        if not mono:
            parts.append(str(c))
        elif c == f.one():
            parts.append(vars_txt)
        elif f.p == 0 and c == -f.one():
            parts.append("-" + vars_txt)
        else:
            parts.append("%s*%s" % (c, vars_txt))
    txt = " + ".join(parts)
    return txt.replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Maurer-Cartan presentations


@dataclass(frozen=True)
class MCEquation:
    """One block of the classical locus: the differential image of the dual
    of a degree-2 basis element, as a matrix of polynomials in the degree-1
    coordinates."""

    label: str
    pair: tuple
    matrix: tuple  # tuple of tuples of poly dicts, shape d_tgt x d_src


@dataclass(frozen=True)
class MCPresentation:
    objects: tuple
    block_sizes: dict
    coordinates: tuple        # variable ids (label, row, col) of degree-1 duals
    generators: tuple         # (label, pair, degree) for every basis label of degree >= 1
    differential: dict        # label -> MCEquation (degree-1 labels map to zero matrices)
    classical_equations: tuple  # MCEquation per degree-2 label
    exactness: str            # "exact" or "truncated:cap=N"
    arity_cap: int
    field: FieldCtx = QQ


def _zero_matrix_of_polys(nrows, ncols):
    return tuple(tuple({} for _ in range(ncols)) for _ in range(nrows))


def _symbolic_matrix(label, nrows, ncols, f):
    return [[{((label, r, c),): f.one()} for c in range(ncols)] for r in range(nrows)]


def _matmul_polys(a, b, f):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[{} for _ in range(m)] for _ in range(n)]
    for r in range(n):
        for c in range(m):
            acc = {}
            for t in range(k):
                acc = poly_add(acc, poly_mul(a[r][t], b[t][c], f), f)
            out[r][c] = acc
    return out


def mc_presentation(cat: AInfCategory, d, certificate=None,
                    arity_cap: int = None) -> MCPresentation:
    """Present the degree-one Maurer-Cartan locus of cat with multiplicity
    vector d as matrix equations.

    Each degree-1 label x: i -> j carries a d_j x d_i variable block; the
    equation attached to a degree-2 label z: i -> j is
    sum_n sum_tuples coeff(tuple -> z) M_{x_1} ... M_{x_n} = 0
    over all stored all-degree-1 input tuples.  When the category is
    complete, or a passing formality certificate (an object whose ok
    attribute is true) guarantees vanishing higher operations, the
    presentation is tagged exact; otherwise it is a truncation at the
    arity cap."""
    f = cat.field
    if cat.op_table(1):
        raise LocalModelError("category is not minimal: nonzero arity-1 operations")
    for (i, j), basis in cat.hom.items():
        for lab, deg in basis:
            if deg > 2:
                raise LocalModelError("degree-%d morphism %r: the degree >= 1 model is implemented for hom degrees <= 2" % (deg, lab))

    if isinstance(d, dict):
        sizes = {obj: int(d.get(obj, 0)) for obj in cat.objects}
    else:
        if len(d) != len(cat.objects):
            raise LocalModelError("multiplicity vector has length %d, want %d" % (len(d), len(cat.objects)))
        sizes = {obj: int(m) for obj, m in zip(cat.objects, d)}
    if any(m < 0 for m in sizes.values()):
        raise LocalModelError("negative multiplicity")

    cap = arity_cap if arity_cap is not None else cat.arity_cap

    coords = []
    generators = []
    deg1 = []
    deg2 = []
    for (i, j) in sorted(cat.hom):
        for lab, deg in cat.hom[(i, j)]:
            if deg < 1:
                continue
            generators.append((lab, (i, j), deg))
            if deg == 1:
                deg1.append((lab, (i, j)))
                for r in range(sizes[j]):
                    for c in range(sizes[i]):
                        coords.append((lab, r, c))
            else:
                deg2.append((lab, (i, j)))

    # accumulate the degree-2 images arity by arity
    eqs = {lab: _zero_matrix_of_polys(sizes[pair[1]], sizes[pair[0]]) for lab, pair in deg2}
    saw_higher = False
    for n in range(2, cap + 1):
        table = cat.op_table(n)
        if table is None:
            continue
        for tup, out in table.items():
            if not all(cat.deg(x) == 1 for x in tup):
                continue
            relevant = {z: c for z, c in out.items() if cat.deg(z) == 2 and not f.is_zero(c)}
            if not relevant:
                continue
            if n >= 3:
                saw_higher = True
            # operator order: tup[0] is applied last, so the matrix product
            # follows the tuple left to right
            prod = None
            ok = True
            for x in tup:
                i, j = cat.pair_of(x)
                if sizes[i] == 0 or sizes[j] == 0:
                    ok = False
                    break
                mx = _symbolic_matrix(x, sizes[j], sizes[i], f)
                prod = mx if prod is None else _matmul_polys(prod, mx, f)
            if not ok:
                continue
            for z, c in relevant.items():
                mat = [list(row) for row in eqs[z]]
                for r in range(len(prod)):
                    for col in range(len(prod[0])):
                        mat[r][col] = poly_add(mat[r][col], poly_scale(prod[r][col], c, f), f)
                eqs[z] = tuple(tuple(row) for row in mat)

    certified = bool(getattr(certificate, "ok", False))
    if certified and saw_higher:
        raise LocalModelError("certificate claims vanishing higher operations but stored tables contradict it")
    if cat.complete or certified or not deg1:
        exactness = "exact"
    else:
        exactness = "truncated:cap=%d" % cap

    differential = {}
    for lab, pair, deg in generators:
        if deg == 1:
            differential[lab] = MCEquation(label=lab, pair=pair,
                                           matrix=_zero_matrix_of_polys(sizes[pair[1]], sizes[pair[0]]))
        else:
            differential[lab] = MCEquation(label=lab, pair=pair, matrix=eqs[lab])

    classical = tuple(MCEquation(label=lab, pair=pair, matrix=eqs[lab]) for lab, pair in deg2)
    return MCPresentation(objects=tuple(cat.objects), block_sizes=sizes,
                          coordinates=tuple(coords), generators=tuple(generators),
                          differential=differential, classical_equations=classical,
                          exactness=exactness, arity_cap=cap, field=f)


def monic_equations(pres: MCPresentation):
    """Scale each equation block so its first nonzero coefficient (scanning
    entries row-major, monomials in sorted order) is 1.  Display form only;
    the zero locus is unchanged."""
    f = pres.field
    out = []
    for eq in pres.classical_equations:
        scale = None
        for row in eq.matrix:
            for poly in row:
                for mono in sorted(poly, key=_poly_sort_key):
                    scale = f.inv(poly[mono])
                    break
                if scale is not None:
                    break
            if scale is not None:
                break
        if scale is None:
            out.append(eq)
            continue
        mat = tuple(tuple(poly_scale(poly, scale, f) for poly in row) for row in eq.matrix)
        out.append(MCEquation(label=eq.label, pair=eq.pair, matrix=mat))
    return tuple(out)


def mc_point(pres: MCPresentation, mats: dict, f: FieldCtx) -> dict:
    """Flatten a dict {degree-1 label: SparseMatrix} into coordinate values."""
    values = {}
    for lab, pair, deg in pres.generators:
        if deg != 1:
            continue
        nrows, ncols = pres.block_sizes[pair[1]], pres.block_sizes[pair[0]]
        m = mats.get(lab)
        for r in range(nrows):
            for c in range(ncols):
                values[(lab, r, c)] = f.zero() if m is None else m.get(r, c)
    return values


def mc_residuals(pres: MCPresentation, values: dict, f: FieldCtx):
    """Evaluate every classical equation block at a point; returns
    {degree-2 label: SparseMatrix residual}."""
    out = {}
    for eq in pres.classical_equations:
        nrows = len(eq.matrix)
        ncols = len(eq.matrix[0]) if nrows else 0
        res = SparseMatrix(nrows, ncols, field=f)
        for r in range(nrows):
            for c in range(ncols):
                res.set(r, c, poly_eval(eq.matrix[r][c], values, f, coeff_field=pres.field))
        out[eq.label] = res
    return out


def mc_vanishes(pres: MCPresentation, values: dict, f: FieldCtx) -> bool:
    return all(m.is_zero() for m in mc_residuals(pres, values, f).values())


# ---------------------------------------------------------------------------
# Euler-form comparison


@dataclass(frozen=True)
class EulerReport:
    lhs: int                  # 2 * chi_Q(d, d)
    rhs: int                  # alternating sum of weighted Ext dims
    by_degree: tuple          # (n, total dim Ext^n weighted by d_i d_j)
    ok: bool


def euler_compare(q: Quiver, d, cat: AInfCategory) -> EulerReport:
    """Check 2 chi_Q(d, d) == sum_n (-1)^n sum_{i,j} d_i d_j dim Ext^n(i, j).

    A mismatch is a hard failure: the category cannot be the local model of
    the quiver at that dimension vector."""
    if isinstance(d, dict):
        dvec = {v: int(d.get(v, 0)) for v in q.vertices}
    else:
        if len(d) != len(q.vertices):
            raise LocalModelError("dimension vector has length %d, want %d" % (len(d), len(q.vertices)))
        dvec = {v: int(m) for v, m in zip(q.vertices, d)}
    if set(str(o) for o in cat.objects) != set(q.vertices):
        raise LocalModelError("quiver vertices %r do not match category objects %r" % (q.vertices, tuple(cat.objects)))

    lhs = 2 * euler_form(q, dvec, dvec)
    weighted = {}
    for (i, j), basis in cat.hom.items():
        w = dvec[str(i)] * dvec[str(j)]
        for _, deg in basis:
            weighted[deg] = weighted.get(deg, 0) + w
    rhs = sum(((-1) ** n) * tot for n, tot in weighted.items())
    by_degree = tuple(sorted(weighted.items()))
    if lhs != rhs:
        raise LocalModelError("Euler form mismatch: 2*chi = %d but alternating Ext sum = %d (by degree %r)" % (lhs, rhs, by_degree))
    return EulerReport(lhs=lhs, rhs=rhs, by_degree=by_degree, ok=True)


# ---------------------------------------------------------------------------
# Harder-Narasimhan types


@dataclass(frozen=True)
class HNType:
    """An ordered tuple of Hilbert polynomials with strictly decreasing
    reduced polynomials summing to the total."""

    polys: tuple

    def reduced_polys(self):
        return tuple(reduced_polynomial(p) for p in self.polys)

    def __len__(self):
        return len(self.polys)


def reduced_polynomial(p: RatPolynomial) -> RatPolynomial:
    """Scale so the leading term is t^d / d!."""
    d = p.degree
    if d < 0:
        raise LocalModelError("cannot reduce the zero polynomial")
    lead = p.leading()
    return p * (Fraction(1, math.factorial(d)) / Fraction(lead))


def _lex_key(p: RatPolynomial, deg: int):
    return tuple(Fraction(p.coeff(k)) for k in range(deg, -1, -1))


def _in_lattice(x: Fraction, den: int) -> bool:
    return (Fraction(x) * den).denominator == 1


def _lattice_range(lo: Fraction, hi: Fraction, den: int):
    """Fractions k/den with lo <= k/den <= hi, ascending."""
    start = math.ceil(Fraction(lo) * den)
    stop = math.floor(Fraction(hi) * den)
    return [Fraction(k, den) for k in range(start, stop + 1)]


def _compositions(total: int, parts: int):
    """Ordered compositions of a positive integer, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def check_hn_type(P: RatPolynomial, q_bound: RatPolynomial, typ: HNType,
                  bogomolov_param=None, lattice=None) -> bool:
    """Re-verify every defining inequality of an HN type independently of
    the enumeration order: positive leading coefficients, lattice
    membership, sum equal to P, strictly decreasing reduced polynomials,
    reduced polynomials >= q_bound, and (degree 2) the constant-term
    lower bounds."""
    deg = P.degree
    lat = tuple(lattice) if lattice is not None else (1,) * (deg + 1)
    total = RatPolynomial.zero()
    for p in typ.polys:
        if p.degree != deg or p.leading() <= 0:
            return False
        for k in range(deg + 1):
            if not _in_lattice(p.coeff(k), lat[k]):
                return False
        total = total + p
    if total != P:
        return False
    qkey = _lex_key(q_bound, deg)
    prev = None
    for p in typ.polys:
        key = _lex_key(reduced_polynomial(p), deg)
        if key < qkey:
            return False
        if prev is not None and not key < prev:
            return False
        prev = key
    if deg == 2 and bogomolov_param is not None:
        for p in typ.polys:
            if Fraction(p.coeff(0)) < Fraction(bogomolov_param(Fraction(p.coeff(2)), Fraction(p.coeff(1)))):
                return False
    return True


def hn_enumerate(P: RatPolynomial, q_bound: RatPolynomial, bogomolov_param=None,
                 lattice=None) -> list:
    """Enumerate all Harder-Narasimhan types with total Hilbert polynomial P
    whose reduced polynomials stay at or above q_bound.

    lattice is a tuple of positive integers, one per coefficient from the
    constant term up: coefficient k of every part must lie in (1/lattice[k]) Z.
    In degree 2 a bogomolov_param callable is required; it maps the leading
    and linear coefficients of a part to a lower bound for its constant term,
    which is what makes the enumeration finite."""
    deg = P.degree
    if deg not in (0, 1, 2):
        raise LocalModelError("Hilbert polynomial degree must be 0, 1 or 2, got %d" % deg)
    if q_bound.degree != deg:
        raise LocalModelError("degree mismatch: P has degree %d, q_bound has degree %d" % (deg, q_bound.degree))
    if Fraction(q_bound.leading()) != Fraction(1, math.factorial(deg)):
        raise LocalModelError("q_bound must be reduced: leading coefficient 1/%d!" % deg)
    if deg == 2 and bogomolov_param is None:
        raise LocalModelError("degree 2 requires bogomolov_param to bound constant terms")
    if P.leading() <= 0:
        raise LocalModelError("total polynomial needs a positive leading coefficient")
    lat = tuple(int(x) for x in (lattice if lattice is not None else (1,) * (deg + 1)))
    if len(lat) != deg + 1 or any(x <= 0 for x in lat):
        raise LocalModelError("lattice needs %d positive denominators" % (deg + 1))
    for k in range(deg + 1):
        if not _in_lattice(P.coeff(k), lat[k]):
            raise LocalModelError("coefficient of t^%d of P is not in the declared lattice" % k)

    qkey = _lex_key(q_bound, deg)
    out = []

    if deg == 0:
        # every reduced part equals 1, so only the singleton can be strict
        if (Fraction(1),) >= qkey:
            out.append(HNType(polys=(P,)))
    elif deg == 1:
        out.extend(_enumerate_deg1(P, qkey, lat))
    else:
        out.extend(_enumerate_deg2(P, qkey, lat, bogomolov_param))

    for typ in out:
        if not check_hn_type(P, q_bound, typ, bogomolov_param=bogomolov_param, lattice=lat):
            raise LocalModelError("enumerated type fails re-verification: %r" % (typ,))
    out.sort(key=lambda t: [_lex_key(p, deg) for p in t.polys])
    return out


def _enumerate_deg1(P, qkey, lat):
    a1, a0 = Fraction(P.coeff(1)), Fraction(P.coeff(0))
    den1, den0 = lat[1], lat[0]
    q0 = qkey[1]
    A = a1 * den1
    results = []

    def assign(idx, leads, rem0, prev_slope, acc):
        b1 = leads[idx]
        lo = q0 * b1
        hi = rem0 - sum(q0 * leads[j] for j in range(idx + 1, len(leads)))
        if prev_slope is not None:
            hi = min(hi, prev_slope * b1)
        if idx == len(leads) - 1:
            b0 = rem0
            if b0 < lo or not _in_lattice(b0, den0):
                return
            slope = b0 / b1
            if prev_slope is not None and not slope < prev_slope:
                return
            results.append(HNType(polys=tuple(acc + [RatPolynomial.of([b0, b1])])))
            return
        for b0 in _lattice_range(lo, hi, den0):
            slope = b0 / b1
            if prev_slope is not None and not slope < prev_slope:
                continue
            assign(idx + 1, leads, rem0 - b0, slope, acc + [RatPolynomial.of([b0, b1])])

    for r in range(1, int(A) + 1):
        for comp in _compositions(int(A), r):
            leads = [Fraction(k, den1) for k in comp]
            assign(0, leads, a0, None, [])
    return results


def _enumerate_deg2(P, qkey, lat, bog):
    a2, a1, a0 = Fraction(P.coeff(2)), Fraction(P.coeff(1)), Fraction(P.coeff(0))
    den2, den1, den0 = lat[2], lat[1], lat[0]
    q1, q0 = qkey[1], qkey[2]
    A = a2 * den2
    results = []

    def lin_window(c2, rem1, others_min):
        lo = 2 * q1 * c2
        hi = rem1 - others_min
        return lo, hi

    def const_floor(c2, c1):
        lo = Fraction(bog(c2, c1))
        if c1 / (2 * c2) == q1:
            lo = max(lo, 2 * q0 * c2)
        return lo

    def assign(idx, leads, rem1, rem0, prev, acc, min_lin_tail, min_const_tail):
        c2 = leads[idx]
        last = idx == len(leads) - 1
        lo1, hi1 = lin_window(c2, rem1, min_lin_tail[idx + 1])
        if prev is not None:
            hi1 = min(hi1, prev[0] * c2)  # weakly decreasing normalized slope
        for c1 in ([rem1] if last else _lattice_range(lo1, hi1, den1)):
            if last and (c1 < lo1 or not _in_lattice(c1, den1)):
                continue
            sigma = c1 / c2
            if prev is not None and sigma > prev[0]:
                continue
            lo0 = const_floor(c2, c1)
            hi0 = rem0 - min_const_tail[idx + 1]
            for c0 in ([rem0] if last else _lattice_range(lo0, hi0, den0)):
                if last and (c0 < lo0 or not _in_lattice(c0, den0)):
                    continue
                tau = c0 / (2 * c2)
                key = (sigma, tau)
                if prev is not None and not key < prev:
                    continue
                if (Fraction(1, 2), sigma / 2, tau) < (qkey[0], qkey[1], qkey[2]):
                    continue
                part = RatPolynomial.of([c0, c1, c2])
                if last:
                    results.append(HNType(polys=tuple(acc + [part])))
                else:
                    assign(idx + 1, leads, rem1 - c1, rem0 - c0, key,
                           acc + [part], min_lin_tail, min_const_tail)

    for r in range(1, int(A) + 1):
        for comp in _compositions(int(A), r):
            leads = [Fraction(k, den2) for k in comp]
            # uniform tail bounds for window propagation
            min_lin = [2 * q1 * c2 for c2 in leads]
            min_const = []
            feasible = True
            for i, c2 in enumerate(leads):
                lo = 2 * q1 * c2
                hi = a1 - (sum(min_lin) - min_lin[i])
                rng = _lattice_range(lo, hi, den1)
                if not rng:
                    feasible = False
                    break
                min_const.append(min(const_floor(c2, c1) for c1 in rng))
            if not feasible:
                continue
            min_lin_tail = [sum(min_lin[j:]) for j in range(len(leads) + 1)]
            min_const_tail = [sum(min_const[j:]) for j in range(len(leads) + 1)]
            assign(0, leads, a1, a0, None, [], min_lin_tail, min_const_tail)
    return results

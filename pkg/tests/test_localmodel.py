"""Local models: Ext-profile certificates, halved quivers, Maurer-Cartan
matrix equations, the Euler-form cross-check, and HN-type enumeration.

The MC equations are validated pointwise against the representation-side
relation checker: a matrix point satisfies the presented equations exactly
when the corresponding module over the preprojective algebra satisfies its
defining relations.  The HN enumerator is validated against a padded
brute-force oracle that re-derives every inequality from scratch.
"""

import functools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ainfty import nccalc as nc
from ainfty import presentations, quiver, repmod
from ainfty.ainf import AInfCategory
from ainfty.field import GF, QQ
from ainfty.localmodel import (HNType, LocalModelError, SigmaCertificate,
                               check_hn_type, euler_compare, ext_quiver_halve,
                               hn_enumerate, mc_point, mc_presentation,
                               mc_residuals, mc_vanishes, monic_equations,
                               poly_str, reduced_polynomial, verify_sigma)
from ainfty.quiver import double, star_name
from ainfty.ratpoly import RatPolynomial
from ainfty.sparse import SparseMatrix
from ainfty.transfer import minimal_model

from hn_oracle import brute_force_types, type_key

F7 = GF(7)


@functools.lru_cache(maxsize=None)
def strict_fixture(kind):
    """Strictified minimal model of the derived preprojective algebra,
    with its formality certificate."""
    q = {"jordan": quiver.jordan_quiver, "a2": quiver.a2_quiver}[kind]()
    dg = presentations.bar_ext_category(quiver.derived_preprojective(q),
                                        weight_cap=2, arity_cap=6)
    cat, _, _ = minimal_model(dg)
    pairing = nc.solve_cyclic_pairing(cat)
    cert = nc.certify_sigma_formality(cat, pairing)
    assert cert.ok
    strict, _, _ = nc.strictify_units(cat, pairing)
    return q, strict, cert


def synthetic_cat(hom):
    return AInfCategory(objects=tuple(sorted({i for i, _ in hom} | {j for _, j in hom})),
                        hom=hom, ops={})


# ---------------------------------------------------------------------------
# profile certificates


def test_sigma_passes_on_genus_one_fixture():
    _, cat, _ = strict_fixture("jordan")
    cert = verify_sigma(cat)
    assert cert.verdict and not cert.failures
    assert cert.genus == {"1": 1}
    assert (cert.ext("1", "1", 0), cert.ext("1", "1", 1), cert.ext("1", "1", 2)) == (1, 2, 1)


def test_sigma_passes_on_two_object_fixture():
    _, cat, _ = strict_fixture("a2")
    cert = verify_sigma(cat)
    assert cert.verdict
    assert cert.genus == {"1": 0, "2": 0}
    assert cert.ext("1", "2", 1) == 1 and cert.ext("2", "1", 1) == 1
    assert cert.ext("1", "2", 0) == 0 and cert.ext("1", "2", 2) == 0


def test_sigma_rejects_third_degree():
    cat = synthetic_cat({("X", "X"): (("e", 0), ("f", 1), ("g", 1), ("z", 2), ("w", 3))})
    cert = verify_sigma(cat)
    assert not cert.verdict
    assert any("Ext^3" in msg for msg in cert.failures)
    assert cert.genus == {}


def test_sigma_rejects_asymmetric_cross_terms():
    cat = synthetic_cat({
        ("X", "X"): (("eX", 0), ("zX", 2)),
        ("Y", "Y"): (("eY", 0), ("zY", 2)),
        ("X", "Y"): (("u", 1),),
    })
    cert = verify_sigma(cat)
    assert not cert.verdict
    assert any("not symmetric" in msg for msg in cert.failures)


def test_sigma_rejects_odd_diagonal():
    cat = synthetic_cat({("X", "X"): (("e", 0), ("f", 1), ("z", 2))})
    cert = verify_sigma(cat)
    assert not cert.verdict
    assert any("odd self-Ext^1" in msg for msg in cert.failures)


def test_sigma_rejects_fat_degree_zero():
    cat = synthetic_cat({("X", "X"): (("e", 0), ("e2", 0), ("z", 2))})
    assert not verify_sigma(cat).verdict


def test_sigma_rejects_cross_terms_outside_degree_one():
    cat = synthetic_cat({
        ("X", "X"): (("eX", 0), ("zX", 2)),
        ("Y", "Y"): (("eY", 0), ("zY", 2)),
        ("X", "Y"): (("u", 0),),
        ("Y", "X"): (("v", 0),),
    })
    cert = verify_sigma(cat)
    assert not cert.verdict
    assert any("off the diagonal" in msg for msg in cert.failures)


# ---------------------------------------------------------------------------
# halved Ext quivers


def test_halve_reproduces_one_loop_quiver():
    _, cat, _ = strict_fixture("jordan")
    q = ext_quiver_halve(verify_sigma(cat))
    assert q == quiver.jordan_quiver()


def test_halve_reproduces_two_vertex_quiver():
    _, cat, _ = strict_fixture("a2")
    q = ext_quiver_halve(verify_sigma(cat))
    assert q == quiver.a2_quiver()


def test_halve_genus_two_gives_two_loops():
    cat = synthetic_cat({("X", "X"): (("e", 0), ("f1", 1), ("f2", 1),
                                      ("f3", 1), ("f4", 1), ("z", 2))})
    q = ext_quiver_halve(verify_sigma(cat))
    assert q.vertices == ("X",)
    assert [(a.src, a.tgt) for a in q.arrows] == [("X", "X"), ("X", "X")]
    assert len({a.name for a in q.arrows}) == 2


def test_halve_splits_odd_cross_term_toward_earlier_object():
    hom = {
        ("X", "X"): (("eX", 0), ("zX", 2)),
        ("Y", "Y"): (("eY", 0), ("zY", 2)),
        ("X", "Y"): (("u1", 1), ("u2", 1), ("u3", 1)),
        ("Y", "X"): (("v1", 1), ("v2", 1), ("v3", 1)),
    }
    q = ext_quiver_halve(verify_sigma(synthetic_cat(hom)))
    fwd = [a for a in q.arrows if (a.src, a.tgt) == ("X", "Y")]
    bwd = [a for a in q.arrows if (a.src, a.tgt) == ("Y", "X")]
    assert (len(fwd), len(bwd)) == (2, 1)
    # doubling restores the full Ext^1 count in each direction
    dq = double(q)
    assert sum(1 for a in dq.arrows if (a.src, a.tgt) == ("X", "Y")) == 3
    assert sum(1 for a in dq.arrows if (a.src, a.tgt) == ("Y", "X")) == 3


def test_halve_refuses_failing_certificate():
    cat = synthetic_cat({("X", "X"): (("e", 0), ("f", 1), ("z", 2))})
    with pytest.raises(LocalModelError, match="not 2CY-consistent"):
        ext_quiver_halve(verify_sigma(cat))


def test_halve_is_deterministic():
    _, cat, _ = strict_fixture("a2")
    q1 = ext_quiver_halve(verify_sigma(cat))
    q2 = ext_quiver_halve(verify_sigma(cat))
    assert q1 == q2


# ---------------------------------------------------------------------------
# Maurer-Cartan presentations


def deg1_labels(cat):
    out = []
    for (i, j) in sorted(cat.hom):
        out.extend(lab for lab, deg in cat.hom[(i, j)] if deg == 1)
    return out


def test_one_dimensional_loop_block_has_zero_equation():
    _, cat, cert = strict_fixture("jordan")
    pres = mc_presentation(cat, (1,), certificate=cert)
    assert pres.exactness == "exact"
    assert len(pres.classical_equations) == 1
    eq = pres.classical_equations[0]
    assert eq.matrix == (({},),)


def test_loop_block_equation_is_the_commutator():
    _, cat, cert = strict_fixture("jordan")
    pres = mc_presentation(cat, (2,), certificate=cert)
    x, y = deg1_labels(cat)
    (eq,) = monic_equations(pres)
    # entry (0,0) of [X, Y] up to global sign: x01 y10 - x10 y01
    assert eq.matrix[0][0] == {
        ((x, 0, 1), (y, 1, 0)): Fraction(1),
        ((x, 1, 0), (y, 0, 1)): Fraction(-1),
    }
    # trace of the equation matrix vanishes identically
    from ainfty.localmodel import poly_add
    trace = poly_add(eq.matrix[0][0], eq.matrix[1][1], pres.field)
    assert trace == {}


def test_two_vertex_rank_one_equation_is_xy():
    _, cat, cert = strict_fixture("a2")
    pres = mc_presentation(cat, (1, 1), certificate=cert)
    u, v = deg1_labels(cat)
    eqs = monic_equations(pres)
    assert len(eqs) == 2
    for eq in eqs:
        assert eq.matrix == (({((u, 0, 0), (v, 0, 0)): Fraction(1)},),)


def test_two_vertex_rank_two_equation_is_the_outer_product():
    _, cat, cert = strict_fixture("a2")
    pres = mc_presentation(cat, (1, 2), certificate=cert)
    u, v = deg1_labels(cat)
    by_pair = {eq.pair: eq for eq in monic_equations(pres)}
    big = by_pair[("2", "2")]
    for r in range(2):
        for c in range(2):
            assert big.matrix[r][c] == {((u, r, 0), (v, 0, c)): Fraction(1)}
    small = by_pair[("1", "1")]
    assert small.matrix[0][0] == {
        ((u, 0, 0), (v, 0, 0)): Fraction(1),
        ((u, 1, 0), (v, 0, 1)): Fraction(1),
    }


def test_presentation_without_certificate_is_truncated():
    _, cat, _ = strict_fixture("jordan")
    pres = mc_presentation(cat, (2,))
    assert pres.exactness.startswith("truncated:cap=")


def test_presentation_rejects_nonminimal_input():
    q = quiver.jordan_quiver()
    dg = presentations.bar_ext_category(quiver.derived_preprojective(q),
                                        weight_cap=2, arity_cap=6)
    with pytest.raises(LocalModelError, match="not minimal"):
        mc_presentation(dg, (1,))


def test_presentation_rejects_high_degrees():
    cat = synthetic_cat({("X", "X"): (("e", 0), ("w", 3))})
    with pytest.raises(LocalModelError, match="degree"):
        mc_presentation(cat, (1,))


def test_presentation_rejects_bad_multiplicities():
    _, cat, _ = strict_fixture("a2")
    with pytest.raises(LocalModelError, match="length"):
        mc_presentation(cat, (1,))
    with pytest.raises(LocalModelError, match="negative"):
        mc_presentation(cat, (1, -1))


def test_commutator_equation_detects_commuting_matrices():
    _, cat, cert = strict_fixture("jordan")
    pres = mc_presentation(cat, (2,), certificate=cert)
    x, y = deg1_labels(cat)

    def point(mx, my):
        mats = {x: SparseMatrix.from_dense(mx), y: SparseMatrix.from_dense(my)}
        return mc_point(pres, mats, QQ)

    commuting = point([[Fraction(1), Fraction(2)], [Fraction(0), Fraction(1)]],
                      [[Fraction(3), Fraction(4)], [Fraction(0), Fraction(3)]])
    assert mc_vanishes(pres, commuting, QQ)
    noncommuting = point([[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]],
                         [[Fraction(0), Fraction(0)], [Fraction(1), Fraction(0)]])
    assert not mc_vanishes(pres, noncommuting, QQ)
    res = mc_residuals(pres, noncommuting, QQ)
    (zlab,) = res
    assert res[zlab].get(0, 0) != 0


# ---------------------------------------------------------------------------
# pointwise agreement with the representation side


def mc_dictionary(cat, q):
    """Match degree-1 labels to arrows of the doubled quiver, per source and
    target pair, both sides in their stored order."""
    dq = double(q)
    arrows_by_pair = {}
    for a in dq.arrows:
        arrows_by_pair.setdefault((a.src, a.tgt), []).append(a.name)
    for pr in arrows_by_pair:
        arrows_by_pair[pr].sort()
    out = {}
    used = {pr: 0 for pr in arrows_by_pair}
    for (i, j) in sorted(cat.hom):
        for lab, deg in cat.hom[(i, j)]:
            if deg != 1:
                continue
            pr = (str(i), str(j))
            out[lab] = arrows_by_pair[pr][used[pr]]
            used[pr] += 1
    return out


def rand_invertible(n, f, rng):
    while True:
        m = SparseMatrix(n, n, field=f)
        for r in range(n):
            for c in range(n):
                m.set(r, c, f.of_int(rng.randrange(7)))
        if repmod.invert_matrix(m) is not None:
            return m


def mu_zero_point(q, d, f, rng):
    """Random representation of the doubled quiver lying on the zero fiber
    of the moment map: a structured solution conjugated by random change of
    basis."""
    dq = double(q)
    verts = list(q.vertices)
    base = {}
    if len(verts) == 1 and d[verts[0]] == 1:
        for a in q.arrows:
            for name in (a.name, star_name(a.name)):
                base[name] = SparseMatrix(1, 1, field=f,
                                          entries={(0, 0): f.of_int(rng.randrange(7))})
    elif len(verts) == 1 and d[verts[0]] == 2:
        # A random, A* a polynomial in A, so they commute
        A = SparseMatrix(2, 2, field=f)
        for r in range(2):
            for c in range(2):
                A.set(r, c, f.of_int(rng.randrange(7)))
        c0, c1 = f.of_int(rng.randrange(7)), f.of_int(rng.randrange(7))
        eye = SparseMatrix(2, 2, field=f, entries={(0, 0): c0, (1, 1): c0})
        a = q.arrows[0]
        base[a.name] = A
        base[star_name(a.name)] = A.scale(c1).add(eye)
    else:
        # one direction of each doubled pair is zero
        for a in q.arrows:
            ns, nt = d[a.src], d[a.tgt]
            M = SparseMatrix(nt, ns, field=f)
            Ms = SparseMatrix(ns, nt, field=f)
            if rng.random() < 0.5:
                for r in range(nt):
                    for c in range(ns):
                        M.set(r, c, f.of_int(rng.randrange(7)))
            else:
                for r in range(ns):
                    for c in range(nt):
                        Ms.set(r, c, f.of_int(rng.randrange(7)))
            base[a.name] = M
            base[star_name(a.name)] = Ms
    rep = repmod.MatrixRep(dq, d, base, field=f)
    g = {v: rand_invertible(d[v], f, rng) for v in verts}
    rep = repmod.conjugate(rep, g)
    assert all(m.is_zero() for m in repmod.moment_map(rep).values())
    return rep


def random_double_rep(q, d, f, rng):
    dq = double(q)
    base = {}
    for a in dq.arrows:
        m = SparseMatrix(d[a.tgt], d[a.src], field=f)
        for r in range(d[a.tgt]):
            for c in range(d[a.src]):
                m.set(r, c, f.of_int(rng.randrange(7)))
        base[a.name] = m
    return repmod.MatrixRep(dq, d, base, field=f)


MC_CASES = [
    ("jordan", {"1": 1}),
    ("jordan", {"1": 2}),
    ("a2", {"1": 1, "2": 1}),
    ("a2", {"1": 1, "2": 2}),
]


@pytest.mark.parametrize("kind,dvec", MC_CASES)
def test_mc_locus_matches_preprojective_relations(kind, dvec):
    q, cat, cert = strict_fixture(kind)
    pres = mc_presentation(cat, [dvec[v] for v in q.vertices], certificate=cert)
    dic = mc_dictionary(cat, q)
    pi = quiver.preprojective(q)
    rng = random.Random(2026)
    for _ in range(25):
        rep = mu_zero_point(q, dvec, F7, rng)
        vals = mc_point(pres, {lab: rep.mats[arr] for lab, arr in dic.items()}, F7)
        assert mc_vanishes(pres, vals, F7)
        assert repmod.eval_relations(rep, pi).ok
        other = random_double_rep(q, dvec, F7, rng)
        ovals = mc_point(pres, {lab: other.mats[arr] for lab, arr in dic.items()}, F7)
        assert mc_vanishes(pres, ovals, F7) == repmod.eval_relations(other, pi).ok


def test_mc_locus_is_conjugation_invariant():
    q, cat, cert = strict_fixture("a2")
    dvec = {"1": 1, "2": 2}
    pres = mc_presentation(cat, (1, 2), certificate=cert)
    dic = mc_dictionary(cat, q)
    rng = random.Random(5)
    for _ in range(10):
        rep = mu_zero_point(q, dvec, F7, rng)
        other = random_double_rep(q, dvec, F7, rng)
        for r in (rep, other):
            vals = mc_point(pres, {lab: r.mats[arr] for lab, arr in dic.items()}, F7)
            g = {v: rand_invertible(dvec[v], F7, rng) for v in q.vertices}
            rg = repmod.conjugate(r, g)
            gvals = mc_point(pres, {lab: rg.mats[arr] for lab, arr in dic.items()}, F7)
            assert mc_vanishes(pres, vals, F7) == mc_vanishes(pres, gvals, F7)


def test_mc_point_fills_missing_blocks_with_zero():
    _, cat, cert = strict_fixture("jordan")
    pres = mc_presentation(cat, (2,), certificate=cert)
    vals = mc_point(pres, {}, QQ)
    assert set(vals) == set(pres.coordinates)
    assert all(v == Fraction(0) for v in vals.values())
    assert mc_vanishes(pres, vals, QQ)


# ---------------------------------------------------------------------------
# Euler-form comparison


def test_euler_identity_for_the_loop():
    q, cat, _ = strict_fixture("jordan")
    rep = euler_compare(q, (1,), cat)
    assert rep.lhs == rep.rhs == 0
    assert rep.by_degree == ((0, 1), (1, 2), (2, 1))


def test_euler_identity_for_two_vertices():
    q, cat, _ = strict_fixture("a2")
    rep = euler_compare(q, (1, 1), cat)
    assert rep.lhs == rep.rhs == 2
    assert euler_compare(q, (1, 2), cat).lhs == 6
    assert euler_compare(q, (3, 1), cat).ok


def test_euler_identity_scales_with_genus():
    cat = synthetic_cat({("X", "X"): (("e", 0), ("f1", 1), ("f2", 1),
                                      ("f3", 1), ("f4", 1), ("z", 2))})
    q = ext_quiver_halve(verify_sigma(cat))
    rep = euler_compare(q, (1,), cat)
    assert rep.lhs == rep.rhs == 2 - 2 * 2


def test_euler_mismatch_is_a_hard_failure():
    cat = synthetic_cat({("1", "1"): (("e", 0), ("f1", 1), ("f2", 1),
                                      ("f3", 1), ("f4", 1), ("z", 2))})
    with pytest.raises(LocalModelError, match="Euler form mismatch"):
        euler_compare(quiver.jordan_quiver(), (1,), cat)


def test_euler_rejects_vertex_mismatch():
    _, cat, _ = strict_fixture("jordan")
    with pytest.raises(LocalModelError, match="do not match"):
        euler_compare(quiver.a2_quiver(), (1, 1), cat)


# ---------------------------------------------------------------------------
# HN types


def poly(*coeffs):
    return RatPolynomial.of([Fraction(c) for c in coeffs])


def crude_bound(c2, c1):
    return Fraction(-3) * c2 - abs(c1)


def test_reduced_polynomial_calibration():
    assert reduced_polynomial(poly(4, 2)).coeffs == (Fraction(2), Fraction(1))
    assert reduced_polynomial(poly(0, 0, 3)).coeffs == (Fraction(0), Fraction(0), Fraction(1, 2))
    assert reduced_polynomial(poly(7)).coeffs == (Fraction(1),)
    with pytest.raises(LocalModelError):
        reduced_polynomial(poly())


def test_two_part_worked_example():
    types = hn_enumerate(poly(0, 2), poly(-1, 1))
    keys = [type_key(t) for t in types]
    assert ((Fraction(1), Fraction(1)), (Fraction(-1), Fraction(1))) in keys
    assert ((Fraction(0), Fraction(2)),) in keys
    assert len(types) == 2


def test_tight_bound_leaves_only_the_singleton():
    types = hn_enumerate(poly(2, 2), poly(1, 1))
    assert [type_key(t) for t in types] == [((Fraction(2), Fraction(2)),)]


def test_bound_above_the_total_slope_leaves_nothing():
    assert hn_enumerate(poly(2, 2), poly(2, 1)) == []


def test_degree_zero_is_trivial():
    types = hn_enumerate(poly(5), poly(1))
    assert [type_key(t) for t in types] == [((Fraction(5),),)]


def test_finer_lattice_admits_new_splits():
    coarse = hn_enumerate(poly(2, 2), poly(Fraction(3, 4), 1), lattice=(1, 1))
    fine = hn_enumerate(poly(2, 2), poly(Fraction(3, 4), 1), lattice=(4, 1))
    assert len(coarse) == 1
    fine_keys = [type_key(t) for t in fine]
    assert ((Fraction(5, 4), Fraction(1)), (Fraction(3, 4), Fraction(1))) in fine_keys
    assert len(fine) == 2


DEG1_SETS = [
    (poly(0, 2), poly(-1, 1), (1, 1)),
    (poly(1, 3), poly(-2, 1), (1, 1)),
    (poly(-2, 3), poly(-2, 1), (1, 1)),
    (poly(0, 4), poly(-1, 1), (1, 1)),
    (poly(3, 2), poly(0, 1), (1, 1)),
    (poly(2, 2), poly(Fraction(3, 4), 1), (4, 1)),
    (poly(Fraction(1, 2), 2), poly(-1, 1), (2, 1)),
    (poly(5, 1), poly(-3, 1), (1, 1)),
    (poly(-1, 3), poly(-1, 1), (1, 1)),
    (poly(1, 1), poly(Fraction(-3, 2), 1), (2, 2)),
]

DEG2_SETS = [
    (poly(1, 0, 2), poly(-2, -1, Fraction(1, 2)), (1, 1, 1)),
    (poly(0, 1, 2), poly(-2, 0, Fraction(1, 2)), (1, 1, 1)),
    (poly(2, 2, 2), poly(-1, 0, Fraction(1, 2)), (1, 1, 1)),
    (poly(-1, 1, 2), poly(-1, -1, Fraction(1, 2)), (1, 1, 1)),
    (poly(1, 1, 2), poly(Fraction(-3, 2), Fraction(-1, 2), Fraction(1, 2)), (2, 2, 1)),
]


@pytest.mark.parametrize("P,q,lat", DEG1_SETS)
def test_degree_one_agrees_with_brute_force(P, q, lat):
    types = hn_enumerate(P, q, lattice=lat)
    got = {type_key(t) for t in types}
    want = brute_force_types(P, q, pad=4, lattice=lat)
    assert got == want
    for t in types:
        assert check_hn_type(P, q, t, lattice=lat)


@pytest.mark.parametrize("P,q,lat", DEG2_SETS)
def test_degree_two_agrees_with_brute_force(P, q, lat):
    types = hn_enumerate(P, q, bogomolov_param=crude_bound, lattice=lat)
    got = {type_key(t) for t in types}
    want = brute_force_types(P, q, pad=3, bogomolov_param=crude_bound, lattice=lat)
    assert got == want
    for t in types:
        assert check_hn_type(P, q, t, bogomolov_param=crude_bound, lattice=lat)


def test_types_are_closed_under_the_defining_inequalities():
    P, q = poly(1, 3), poly(-2, 1)
    types = hn_enumerate(P, q)
    assert types
    for t in types:
        assert sum(t.polys, RatPolynomial.zero()) == P
        reduced = t.reduced_polys()
        for a, b in zip(reduced, reduced[1:]):
            assert tuple(a.coeffs) != tuple(b.coeffs)
        # perturbed variants must fail re-verification
        if len(t.polys) > 1:
            swapped = HNType(polys=tuple(reversed(t.polys)))
            assert not check_hn_type(P, q, swapped)
        bumped = HNType(polys=(t.polys[0] + 1,) + t.polys[1:])
        assert not check_hn_type(P, q, bumped)


def test_enumeration_is_deterministic():
    P, q = poly(1, 3), poly(-2, 1)
    a = hn_enumerate(P, q)
    b = hn_enumerate(P, q)
    assert [type_key(t) for t in a] == [type_key(t) for t in b]
    c = hn_enumerate(poly(1, 0, 2), poly(-2, -1, Fraction(1, 2)), bogomolov_param=crude_bound)
    d = hn_enumerate(poly(1, 0, 2), poly(-2, -1, Fraction(1, 2)), bogomolov_param=crude_bound)
    assert [type_key(t) for t in c] == [type_key(t) for t in d]


def test_enumeration_input_validation():
    with pytest.raises(LocalModelError, match="degree mismatch"):
        hn_enumerate(poly(0, 1), poly(1))
    with pytest.raises(LocalModelError, match="bogomolov"):
        hn_enumerate(poly(0, 0, 1), poly(0, 0, Fraction(1, 2)))
    with pytest.raises(LocalModelError, match="reduced"):
        hn_enumerate(poly(0, 2), poly(0, 2))
    with pytest.raises(LocalModelError, match="degree"):
        hn_enumerate(poly(0, 0, 0, 1), poly(0, 0, 0, Fraction(1, 6)))
    with pytest.raises(LocalModelError, match="lattice"):
        hn_enumerate(poly(Fraction(1, 2), 1), poly(0, 1))
    with pytest.raises(LocalModelError, match="positive leading"):
        hn_enumerate(poly(1, -1), poly(0, 1))


@settings(max_examples=20, deadline=None)
@given(a1=st.integers(min_value=1, max_value=3),
       a0=st.integers(min_value=-3, max_value=3),
       q0=st.integers(min_value=-3, max_value=1))
def test_random_degree_one_sets_agree_with_brute_force(a1, a0, q0):
    P, q = poly(a0, a1), poly(q0, 1)
    got = {type_key(t) for t in hn_enumerate(P, q)}
    want = brute_force_types(P, q, pad=4)
    assert got == want

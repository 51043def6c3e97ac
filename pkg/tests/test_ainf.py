"""Relation checking, units, suspension signs, perturbation detection."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ainfty.ainf import (AInfCategory, b_from_m, check_relations,
                         check_unitality, degree_support_bound, m_from_b,
                         suspension_sign, validate_category)
from ainfty.field import GF, QQ
from ainfty.presentations import (bar_ext_category, enumerate_paths,
                                  enumerate_words, perturbed,
                                  truncated_path_category)
from ainfty.quiver import (a2_quiver, derived_preprojective, jordan_quiver,
                           two_loop_quiver)


QUIVERS = {"jordan": jordan_quiver(), "a2": a2_quiver(),
           "two_loop": two_loop_quiver()}


def tpc(name, cap=3, field=QQ):
    return truncated_path_category(derived_preprojective(QUIVERS[name]), cap,
                                   field=field)


def bec(name, cap=3, field=QQ):
    return bar_ext_category(derived_preprojective(QUIVERS[name]), cap,
                            field=field)


def test_suspension_sign_frozen():
    # single input: no sign; two inputs: (-1)^deg(first)
    assert suspension_sign([5]) == 1
    assert suspension_sign([1, 1]) == -1
    assert suspension_sign([2, 1]) == 1
    assert suspension_sign([1, 2]) == -1
    # three inputs: (-1)^(2 d1 + d2)
    assert suspension_sign([1, 1, 1]) == -1
    assert suspension_sign([1, 2, 7]) == 1


def test_path_counts_frozen():
    # free algebra on a, a*, u with wt(a) = wt(a*) = 1, wt(u) = 2:
    # path counts per weight satisfy P(w) = 2 P(w-1) + P(w-2)
    alg = derived_preprojective(QUIVERS["jordan"])
    for cap, want in [(0, 1), (1, 3), (2, 8), (3, 20), (4, 49)]:
        assert len(enumerate_paths(alg, cap)) == want
    # bar words: N(w) = sum_k P(k) N(w-k) over letter weights k >= 1
    for cap, want in [(0, 1), (1, 3), (2, 12), (3, 52), (4, 230)]:
        assert len(enumerate_words(alg, cap)) == want


@pytest.mark.parametrize("name", sorted(QUIVERS))
def test_truncated_path_category_is_dg(name):
    cat = tpc(name)
    assert validate_category(cat) == []
    rep = check_relations(cat)
    assert rep.ok, rep.witnesses[:3]
    assert set(rep.checked) == set(range(1, 7))
    assert check_unitality(cat).verdict == "strict"


@pytest.mark.parametrize("name", sorted(QUIVERS))
def test_bar_category_is_dg(name):
    cat = bec(name)
    assert validate_category(cat) == []
    rep = check_relations(cat, max_arity=4)
    assert rep.ok, rep.witnesses[:3]
    assert check_unitality(cat).verdict == "strict"


def test_bar_category_mod_p():
    cat = bec("a2", cap=3, field=GF(7))
    assert validate_category(cat) == []
    assert check_relations(cat, max_arity=3).ok


def test_truncation_flagged_beyond_cap():
    cat = tpc("jordan")
    incomplete = AInfCategory(
        objects=cat.objects, hom=cat.hom, ops=cat.ops, field=cat.field,
        arity_cap=2, units=cat.units, complete=False)
    rep = check_relations(incomplete, max_arity=5)
    # with b_n unknown for n > 2, only the n <= 2 relations are decidable
    assert set(rep.checked) == {1, 2}
    assert set(rep.truncated) == {3, 4, 5}


def test_m_b_conversion_round_trip():
    for cat in (tpc("two_loop"), bec("jordan", cap=2)):
        degs = {lab: cat.deg(lab) for lab in cat.labels()}
        m_ops = m_from_b(degs, cat.ops, cat.field)
        assert b_from_m(degs, m_ops, cat.field) == cat.ops
    # bidegree (1, 1) multiplication flips sign, (0, d) does not
    cat = bec("jordan", cap=2)
    m_ops = m_from_b({lab: cat.deg(lab) for lab in cat.labels()},
                     cat.ops, cat.field)
    pair11 = [(t, o) for t, o in m_ops[2].items()
              if cat.deg(t[0]) == 1 and cat.deg(t[1]) == 1]
    assert pair11
    for t, out in pair11:
        b_out = cat.ops[2][t]
        assert out == {z: cat.field.neg(c) for z, c in b_out.items()}


@given(st.integers(0, 59))
@settings(max_examples=60, deadline=None)
def test_single_constant_perturbations_detected(which):
    cat = tpc("jordan", cap=3)
    bad, info = perturbed(cat, which)
    rep = check_relations(bad, max_arity=4)
    assert not rep.ok
    # the reported witness involves an arity adjacent to the broken table
    n_bad = info["arity"]
    arities = {w[0] for w in rep.witnesses}
    assert arities & {n_bad, n_bad + 1, n_bad + 2}


def test_perturbation_witness_names_instance():
    cat = tpc("a2", cap=2)
    bad, info = perturbed(cat, 7)
    rep = check_relations(bad, max_arity=4)
    assert not rep.ok
    n, tup, out, resid = rep.first_witness()
    assert isinstance(tup, tuple) and all(bad.has_label(x) for x in tup)
    assert bad.has_label(out)
    assert not bad.field.is_zero(resid)


def test_degree_support_bound_excludes_units():
    cat = bec("jordan", cap=2)
    # degrees present: 0 (unit + [a|a*] etc.), 1, 2
    sup = degree_support_bound(cat, [3])
    degs = {d for t in sup[3] for d in t}
    assert degs  # nonempty: degree-0 nonunit words exist at this cap
    support = degree_support_bound(cat, [2])
    assert all(sum(t) in (0, 1, 2, 3, 4) for t in support[2])

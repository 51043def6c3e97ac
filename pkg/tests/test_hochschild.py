"""Windowed Hochschild/cyclic complex checks.

Graded identities are asserted exactly on basis chains; the homology
oracles (commutator quotients, hand-expanded low-length differentials,
classical values of the Connes operator) are recomputed inside the tests
rather than taken from the module under test.
"""

import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from ainfty.hochschild import (HochschildChainWindow, HochschildError,
                               chain_degree, connes_B, cyclic_permute,
                               cyclic_quotient, hh0_dimension, hochschild_b,
                               windowed_homology)
from ainfty.ainf import check_relations
from ainfty.presentations import perturbed, truncated_path_category
from ainfty.quiver import (DGQuiverAlgebra, Quiver, a2_quiver,
                           derived_preprojective, jordan_quiver,
                           random_quiver)


def path_category(q, cap=2):
    return truncated_path_category(DGQuiverAlgebra(q, (), ()), weight_cap=cap)


def point_category():
    return path_category(Quiver.make(("1",), ()))


@pytest.fixture(scope="module")
def wk():
    return HochschildChainWindow(point_category(), 5)


@pytest.fixture(scope="module")
def wa2():
    return HochschildChainWindow(path_category(a2_quiver()), 5)


@pytest.fixture(scope="module")
def wjordan():
    return HochschildChainWindow(path_category(jordan_quiver()), 4)


@pytest.fixture(scope="module")
def wdpp():
    cat = truncated_path_category(derived_preprojective(a2_quiver()),
                                  weight_cap=2)
    return HochschildChainWindow(cat, 4)


def addc(f, a, b):
    out = dict(a)
    for k, v in b.items():
        s = f.add(out.get(k, f.of_int(0)), v)
        if f.is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


def every_chain(window, max_len=None):
    for n in range(1, (max_len or window.max_length) + 1):
        for tup in window.basis(n):
            yield tup


# ---------------------------------------------------------------------------
# chains and degrees

def test_degree_formula_has_no_length_seam(wdpp):
    cat = wdpp.cat
    for lab, in wdpp.basis(1):
        assert chain_degree(cat, (lab,)) == cat.deg(lab)
    for x, y in wdpp.basis(2):
        assert chain_degree(cat, (x, y)) == cat.deg(x) + cat.deg(y) - 1


def test_basis_contains_only_cyclically_closed_chains(wa2):
    cat = wa2.cat
    assert wa2.basis(1) == [("e@1",), ("e@2",)]
    # the arrow is not an endomorphism, so it heads no chain of any length
    for tup in every_chain(wa2):
        assert cat.src(tup[-1]) == cat.tgt(tup[0])
        for k in range(len(tup) - 1):
            assert cat.src(tup[k]) == cat.tgt(tup[k + 1])
    assert all("a" not in tup for tup in every_chain(wa2))


def test_basis_rejects_lengths_outside_window(wa2):
    with pytest.raises(HochschildError):
        wa2.basis(0)
    with pytest.raises(HochschildError):
        wa2.basis(wa2.max_length + 1)


def test_check_chain_rejects_bad_input(wa2):
    f = wa2.cat.field
    with pytest.raises(HochschildError):
        hochschild_b(wa2, {("a", "e@1"): f.of_int(1)})
    with pytest.raises(HochschildError):
        hochschild_b(wa2, {("e@1",) * (wa2.max_length + 1): f.of_int(1)})


def test_window_rejects_higher_operations():
    cat = point_category()
    f = cat.field
    ops = {n: dict(tab) for n, tab in cat.ops.items()}
    ops[3] = {("e@1", "e@1", "e@1"): {"e@1": f.of_int(1)}}
    bad = dataclasses.replace(cat, ops=ops)
    with pytest.raises(HochschildError):
        HochschildChainWindow(bad, 3)
    with pytest.raises(HochschildError):
        HochschildChainWindow(cat, 0)


# ---------------------------------------------------------------------------
# the differential

def test_b_vanishes_on_unit_chains(wk, wa2, wdpp):
    for w in (wk, wa2, wdpp):
        f = w.cat.field
        for obj, e in w.cat.units.items():
            assert hochschild_b(w, {(e,): f.of_int(1)}) == {}


def test_b_is_degree_one_and_never_raises_length(wdpp):
    cat = wdpp.cat
    f = cat.field
    for tup in every_chain(wdpp):
        out = hochschild_b(wdpp, {tup: f.of_int(1)})
        for new in out:
            assert len(new) <= len(tup)
            assert chain_degree(cat, new) == chain_degree(cat, tup) + 1


def test_b_on_length_two_matches_hand_expansion(wdpp):
    # b(x|y) = b1 x (x) 1 terms + b2(x,y) + (-1)^{|x|'|y|'} b2(y,x)
    cat = wdpp.cat
    f = cat.field
    b1 = cat.op_table(1) or {}
    b2 = cat.op_table(2) or {}
    for x, y in wdpp.basis(2):
        want = {}
        for z, c in (b1.get((x,)) or {}).items():
            want = addc(f, want, {(z, y): c})
        sx = f.of_int(-1 if (cat.deg(x) - 1) % 2 else 1)
        for z, c in (b1.get((y,)) or {}).items():
            want = addc(f, want, {(x, z): f.mul(sx, c)})
        for z, c in (b2.get((x, y)) or {}).items():
            want = addc(f, want, {(z,): c})
        wrap = (cat.deg(x) - 1) * (cat.deg(y) - 1)
        sw = f.of_int(-1 if wrap % 2 else 1)
        for z, c in (b2.get((y, x)) or {}).items():
            want = addc(f, want, {(z,): f.mul(sw, c)})
        assert hochschild_b(wdpp, {(x, y): f.of_int(1)}) == want


def test_b_squared_zero_on_all_window_chains(wk, wa2, wjordan, wdpp):
    for w in (wk, wa2, wjordan, wdpp):
        f = w.cat.field
        for tup in every_chain(w):
            assert hochschild_b(w, hochschild_b(w, {tup: f.of_int(1)})) == {}


# ---------------------------------------------------------------------------
# the Connes operator

def test_connes_B_on_point_unit(wk):
    f = wk.cat.field
    e = wk.cat.units["1"]
    got = connes_B(wk, {(e,): f.of_int(1)})
    assert got == {(e, e): f.of_int(2)}
    assert connes_B(wk, got) == {}
    # 2(e|e) is the boundary of 2(e|e|e), so it dies in homology
    assert hochschild_b(wk, {(e, e, e): f.of_int(2)}) == got


def test_connes_B_on_degree_zero_loop(wjordan):
    # B(a) = (e|a) + (a|e) for an even loop a: both rotations insert the
    # unit in front and the extra rotation of (e|a) carries sign +1
    f = wjordan.cat.field
    e = wjordan.cat.units["1"]
    got = connes_B(wjordan, {("a",): f.of_int(1)})
    assert got == {(e, "a"): f.of_int(1), ("a", e): f.of_int(1)}


def test_connes_identities_exact(wa2, wjordan, wdpp):
    for w in (wa2, wjordan, wdpp):
        f = w.cat.field
        for tup in every_chain(w, w.max_length - 2):
            c = {tup: f.of_int(1)}
            assert connes_B(w, connes_B(w, c)) == {}
            anti = addc(f, hochschild_b(w, connes_B(w, c)),
                        connes_B(w, hochschild_b(w, c)))
            assert anti == {}, (tup, anti)


def test_connes_B_window_boundary_error(wa2):
    f = wa2.cat.field
    top = ("e@1",) * wa2.max_length
    with pytest.raises(HochschildError, match="insufficient window"):
        connes_B(wa2, {top: f.of_int(1)})


def test_connes_B_requires_units(wa2):
    cat = dataclasses.replace(wa2.cat, units={})
    w = HochschildChainWindow(cat, 3)
    with pytest.raises(HochschildError, match="unit"):
        connes_B(w, {("e@1",): cat.field.of_int(1)})


# ---------------------------------------------------------------------------
# cyclic quotient

def test_cyclic_permutation_has_order_n(wdpp):
    for tup in every_chain(wdpp):
        cur, sign = tup, 1
        for _ in range(len(tup)):
            cur, s = cyclic_permute(wdpp, cur)
            sign *= s
        assert cur == tup and sign == 1


def test_cyclic_quotient_point(wk):
    cyc = cyclic_quotient(wk)
    assert cyc.basis(1) == [("e@1",)]
    # (e|e) is fixed by the rotation up to sign -1, so its class is zero
    assert cyc.push_tuple(("e@1", "e@1")) is None
    assert cyc.basis(2) == []


def test_cyclic_quotient_a2_dims(wa2):
    cyc = cyclic_quotient(wa2)
    assert [len(cyc.basis(n)) for n in (1, 2, 3)] == [2, 0, 2]


def test_quotient_kills_one_minus_F_and_b_descends(wdpp):
    f = wdpp.cat.field
    cyc = cyclic_quotient(wdpp)
    for n in range(2, wdpp.max_length + 1):
        for tup in wdpp.basis(n):
            rot, s = cyclic_permute(wdpp, tup)
            chain = addc(f, {tup: f.of_int(1)}, {rot: f.of_int(-s)})
            assert cyc.push(chain) == {}
            assert cyc.b(chain) == {}


# ---------------------------------------------------------------------------
# windowed homology

def commutator_quotient_dim(cat):
    """dim of (degree-0 endomorphisms) / span{xy - yx} computed directly."""
    from ainfty.sparse import SparseMatrix, rank_kernel_image
    f = cat.field
    endos = sorted(lab for pair, basis in cat.hom.items()
                   if pair[0] == pair[1] for lab, d in basis if d == 0)
    idx = {lab: i for i, lab in enumerate(endos)}
    b2 = cat.op_table(2) or {}
    labels = [lab for pair, basis in cat.hom.items() for lab, _ in basis]
    rows = []
    for x in labels:
        for y in labels:
            if cat.src(x) != cat.tgt(y) or cat.src(y) != cat.tgt(x):
                continue
            row = {}
            for z, c in (b2.get((x, y)) or {}).items():
                sx = f.of_int(-1 if cat.deg(x) % 2 else 1)
                row[idx[z]] = f.add(row.get(idx[z], f.of_int(0)), f.mul(sx, c))
            for z, c in (b2.get((y, x)) or {}).items():
                sy = f.of_int(-1 if cat.deg(y) % 2 else 1)
                row[idx[z]] = f.add(row.get(idx[z], f.of_int(0)),
                                    f.neg(f.mul(sy, c)))
            row = {k: v for k, v in row.items() if not f.is_zero(v)}
            if row:
                rows.append(row)
    if not rows:
        return len(endos)
    mat = SparseMatrix.from_rows(rows, len(endos), f)
    return len(endos) - rank_kernel_image(mat)[0]


def test_homology_point(wk):
    rep = windowed_homology(wk)
    assert rep.dims == {(1, 0): 1}
    assert rep.by_degree == {0: 1}
    assert rep.stable is True
    assert hh0_dimension(wk) == 1


def test_hh0_matches_commutator_quotient(wk, wa2, wjordan):
    for w, expect in ((wk, 1), (wa2, 2), (wjordan, 3)):
        direct = commutator_quotient_dim(w.cat)
        assert direct == expect
        assert hh0_dimension(w) == direct


def test_hh0_commutator_oracle_on_random_path_categories():
    for seed in (3, 5, 11):
        cat = path_category(random_quiver(seed))
        w = HochschildChainWindow(cat, 3)
        assert hh0_dimension(w) == commutator_quotient_dim(cat)


def test_homology_rejects_margin_zero(wa2):
    with pytest.raises(HochschildError):
        windowed_homology(wa2, length_margin=0)


def test_homology_propagates_validity_failure(wjordan):
    cat = wjordan.cat
    bad = None
    for which in range(40):
        cand, _ = perturbed(cat, which)
        if not check_relations(cand).ok:
            bad = cand
            break
    assert bad is not None
    with pytest.raises(HochschildError, match="relations"):
        windowed_homology(HochschildChainWindow(bad, 3))


def test_stability_flag_means_window_growth_is_silent(wjordan):
    rep = windowed_homology(wjordan, length_margin=2)
    assert isinstance(rep.stable, bool)
    grown = HochschildChainWindow(wjordan.cat, wjordan.max_length + 1)
    again = windowed_homology(grown, length_margin=3)
    assert (again.dims == rep.dims) == rep.stable


def test_graded_window_homology_is_stable():
    cat = truncated_path_category(derived_preprojective(a2_quiver()),
                                  weight_cap=2)
    rep = windowed_homology(HochschildChainWindow(cat, 3))
    assert rep.stable is True
    for (length, degree), dim in rep.dims.items():
        assert 1 <= length <= 2 and dim > 0


# ---------------------------------------------------------------------------
# randomized sweeps

def stride_sample(items, cap=60):
    step = max(1, len(items) // cap)
    return items[::step]


def test_identities_on_random_categories():
    for seed in range(20):
        q = random_quiver(seed)
        if seed % 2:
            cat = path_category(q)
        else:
            cat = truncated_path_category(derived_preprojective(q),
                                          weight_cap=2)
        w = HochschildChainWindow(cat, 4)
        f = cat.field
        for n in range(1, 5):
            chains = w.basis(n) if n <= 2 else stride_sample(w.basis(n))
            for tup in chains:
                c = {tup: f.of_int(1)}
                assert hochschild_b(w, hochschild_b(w, c)) == {}
                if n <= 2:
                    assert connes_B(w, connes_B(w, c)) == {}
                if n <= 3:
                    anti = addc(f, hochschild_b(w, connes_B(w, c)),
                                connes_B(w, hochschild_b(w, c)))
                    assert anti == {}, (seed, tup)


@st.composite
def jordan_chains(draw):
    w = _JORDAN[0]
    tups = [t for n in range(1, w.max_length + 1) for t in w.basis(n)]
    picks = draw(st.lists(st.sampled_from(tups), min_size=1, max_size=3))
    f = w.cat.field
    chain = {}
    for tup in picks:
        c = f.of_int(draw(st.integers(min_value=-4, max_value=4)))
        chain = addc(f, chain, {tup: c})
    return chain


@settings(max_examples=30, deadline=None)
@given(jordan_chains())
def test_b_is_linear_and_square_zero(chain):
    w = _JORDAN[0]
    f = w.cat.field
    assert hochschild_b(w, hochschild_b(w, chain)) == {}
    parts = [{t: c} for t, c in chain.items()]
    total = {}
    for p in parts:
        total = addc(f, total, hochschild_b(w, p))
    assert total == hochschild_b(w, chain)


_JORDAN = [HochschildChainWindow(path_category(jordan_quiver()), 4)]

"""Identity battery for the noncommutative calculus sign conventions.

Runs the operator identities that pin every sign in the calculus layer:
d^2 = 0, Euler L_E = order, Cartan, [Q,Q] = 0 iff relations, the potential
dictionary round trip, bracket route agreement, antisymmetry, and the
master equation.  Any red line here means a sign convention drifted.
"""

import sys
from fractions import Fraction

sys.path.insert(0, "src")
sys.path.insert(0, "tests")

from ainfty.quiver import jordan_quiver, a2_quiver, derived_preprojective
from ainfty.presentations import bar_ext_category
from ainfty.transfer import minimal_model
from ainfty.ainf import check_relations
from ainfty import nccalc as nc
from ainfty.ncword import NCContext, canonical_cyclic, enumerate_forms


def banner(msg, ok):
    print(("PASS  " if ok else "FAIL  ") + msg)
    return ok


def minimal_of(quiver, wcap=2, cap=6):
    alg = derived_preprojective(quiver)
    cat = bar_ext_category(alg, weight_cap=wcap, arity_cap=cap)
    mini, functor, _ = minimal_model(cat)
    return mini


def massey_cat():
    from test_massey import exterior_fixture
    cat = exterior_fixture()
    mini, _, _ = minimal_model(cat)
    return mini


def main():
    ok = True
    jordan = minimal_of(jordan_quiver())
    a2 = minimal_of(a2_quiver())
    massey = massey_cat()

    # 1. [Q,Q] = 0 on valid categories, including one with b_3 != 0
    for name, cat in (("jordan", jordan), ("a2", a2), ("massey", massey)):
        q = nc.category_to_vectorfield(cat)
        sq = nc.vf_square_obstruction(q)
        ok &= banner("[Q,Q] = 0 on %s" % name, not sq)
        if sq:
            lab = sorted(sq)[0]
            print("   first obstruction at", lab, sorted(sq[lab].items())[:3])

    # 2. round trip tables -> Q -> tables
    for name, cat in (("jordan", jordan), ("massey", massey)):
        q = nc.category_to_vectorfield(cat)
        back = nc.vectorfield_to_tables(q)
        want = {n: {t: o for t, o in (cat.op_table(n) or {}).items() if o}
                for n in cat.known_arities()}
        want = {n: t for n, t in want.items() if t}
        ok &= banner("dualization round trip on %s" % name, back == want)

    # 3. perturbation breaks [Q,Q] = 0
    import copy
    bad = copy.deepcopy(jordan)
    tup = sorted(bad.ops[2])[0]
    out = sorted(bad.hom[(bad.src(tup[-1]), bad.tgt(tup[0]))])
    tgt_deg = sum(bad.deg(l) for l in tup) + 2 - 2
    cand = [lab for lab, d in bad.hom[(bad.src(tup[-1]), bad.tgt(tup[0]))]]
    bad.ops.setdefault(3, {})
    # plant a junk ternary constant
    triple = None
    for t3 in sorted(bad.ops[2]):
        pass
    labs = [lab for pair in sorted(bad.hom) for lab, d in bad.hom[pair]]
    planted = False
    for x in labs:
        for y in labs:
            for z in labs:
                if not bad.composable((x, y, z)):
                    continue
                pr = (bad.src(z), bad.tgt(x))
                outs = [l for l, d in bad.hom[pr]
                        if d == bad.deg(x) + bad.deg(y) + bad.deg(z) - 1]
                if outs:
                    bad.ops[3][(x, y, z)] = {outs[0]: Fraction(1)}
                    planted = True
                    break
            if planted:
                break
        if planted:
            break
    qbad = nc.category_to_vectorfield(bad)
    rel = check_relations(bad)
    sq = nc.vf_square_obstruction(qbad)
    ok &= banner("perturbed: relations fail iff [Q,Q] != 0",
                 (not rel.ok) == bool(sq))

    # 4. d^2 = 0 and Euler identity on assorted forms
    ctx = NCContext.from_category(jordan)
    f = ctx.field
    words = nc.enumerate_cyclic_words(ctx, 3) + nc.enumerate_cyclic_words(ctx, 4)
    fn = nc.NCFunction(ctx, {w: f.of_int(1 + i % 3) for i, w in enumerate(words[:6])}, 7)
    dd = nc.de_rham(nc.de_rham(fn))
    ok &= banner("d^2 = 0 on functions", dd.is_zero())
    e = nc.euler_field(ctx, 7)
    lhs = nc.lie_derivative(e, nc.function_as_form(fn))
    want = {}
    for cfg, c in fn.terms.items():
        want[cfg] = f.mul(c, f.of_int(len(cfg)))
    ok &= banner("Euler field: L_E = order x id", lhs.terms == want)

    # 5. pairing, potential, round trip on jordan and a2
    for name, cat in (("jordan", jordan), ("a2", a2)):
        pairing = nc.solve_cyclic_pairing(cat)
        pot = nc.potential_from_category(cat, pairing)   # checks dW = iota_Q omega
        ok &= banner("potential solved (dW = iota_Q omega) on %s" % name, True)
        cat2 = nc.category_from_potential(pot, pairing, cat)
        same = all((cat.op_table(n) or {}) == (cat2.op_table(n) or {})
                   for n in range(1, cat.arity_cap + 1)
                   if cat.op_table(n) is not None)
        ok &= banner("potential/category round trip on %s" % name, same)
        w = pot.func
        br = nc.poisson_bracket(w, w, pairing)
        ok &= banner("{W,W} = 0 (necklace) on %s" % name,
                     br.is_zero() and not br.constant)
        ctx2 = w.ctx
        omega = nc.omega_from_pairing(ctx2, pairing, w.order_cap)
        q = nc.category_to_vectorfield(cat)
        hw = nc.hamiltonian_field(w, omega)
        ok &= banner("Q = hamiltonian field of W on %s" % name,
                     hw.images == q.images)

    # 6. bracket route agreement and antisymmetry on homogeneous samples
    pairing = nc.solve_cyclic_pairing(jordan)
    ctx = NCContext.from_category(jordan)
    omega = nc.omega_from_pairing(ctx, pairing, 7)
    by_deg = {}
    for n in (3, 4):
        for w in nc.enumerate_cyclic_words(ctx, n):
            by_deg.setdefault(ctx.cfg_degree(w), []).append(w)
    samples = []
    for deg, words in sorted(by_deg.items()):
        for i in range(0, min(len(words), 4), 2):
            terms = {words[i]: f.of_int(2 + i)}
            if i + 1 < len(words):
                terms[words[i + 1]] = f.of_int(-1 - i)
            samples.append(nc.NCFunction(ctx, terms, 7))
    agree = True
    anti = True
    for g1 in samples:
        for g2 in samples:
            route_a = nc.poisson_bracket(g1, g2, pairing)
            route_b = nc.bracket_via_hamiltonian(g1, g2, omega)
            if route_a.terms != route_b.terms:
                agree = False
            d1 = ctx.cfg_degree(next(iter(g1.terms)))
            d2 = ctx.cfg_degree(next(iter(g2.terms)))
            rev = nc.poisson_bracket(g2, g1, pairing)
            s = 1 if ((d1 + 1) * (d2 + 1)) % 2 == 0 else -1
            flip = rev.scale(f.of_int(s))
            if route_a.terms != flip.terms:
                anti = False
    ok &= banner("necklace bracket agrees with iota/omega route", agree)
    ok &= banner("bracket graded antisymmetry", anti)

    print("ALL OK" if ok else "CALIBRATION FAILED")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

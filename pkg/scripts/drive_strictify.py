"""Driver for the unit-strictification loop on a planted fixture.

Plants a non-reduced potential by flowing the Jordan-shape model along the
inverse Hamiltonian flow of a degree-0 cubic that contains a unit letter,
then checks strictify_units restores reducedness, preserves omega, and
emits a functor that passes check_functor.  Also probes which direction the
dualized automorphism must face.
"""
import sys
sys.path.insert(0, "src")

from ainfty import presentations, quiver
from ainfty.transfer import minimal_model
from ainfty.ainf import check_relations, check_unitality, check_functor
from ainfty.ncword import NCContext
from ainfty import nccalc as nc


def banner(msg, ok):
    print(("PASS  " if ok else "FAIL  ") + msg)
    return ok


def main():
    ok = True
    q = quiver.jordan_quiver()
    dg = presentations.bar_ext_category(quiver.derived_preprojective(q),
                                        weight_cap=2, arity_cap=6)
    cat, _, _ = minimal_model(dg)
    f = cat.field
    pairing = nc.solve_cyclic_pairing(cat)
    pot = nc.potential_from_category(cat, pairing)
    ctx = pot.func.ctx
    cap = pot.order_cap
    omega = nc.omega_from_pairing(ctx, pairing, cap)

    units = ctx.unit_labels()
    words = [w for w in nc.enumerate_cyclic_words(ctx, 3, degree=0)
             if any(l in units for l, _ in w)]
    ok &= banner("found a degree-0 cubic word with a unit letter", bool(words))
    s = nc.NCFunction(ctx, {words[0]: f.of_int(1)}, cap)
    flow = nc.hamiltonian_exp(s.scale(f.of_int(-1)), omega, cap)
    w_planted = nc.auto_apply_function(flow, pot.func)

    same3 = w_planted.order_part(3).add(
        pot.func.order_part(3).scale(f.of_int(-1))).is_zero()
    ok &= banner("flow preserves the cubic part", same3)
    bad4 = w_planted.order_part(4).nonreduced_part()
    ok &= banner("planted quartic part is non-reduced", not bad4.is_zero())

    pot_planted = nc.Potential(w_planted, cap, truncated=w_planted.truncated)
    cat_planted = nc.category_from_potential(pot_planted, pairing, cat)
    rel = check_relations(cat_planted)
    ok &= banner("planted category satisfies the relations", rel.ok)
    unital = check_unitality(cat_planted)
    ok &= banner("planted category fails strict unitality", unital.verdict != "strict")
    cyc = nc.check_cyclicity(cat_planted, pairing)
    ok &= banner("planted category still cyclic for the same pairing", cyc.ok)

    cat2, iso, report = nc.strictify_units(cat_planted, pairing)
    print("  processed orders:", report.processed_orders,
          "supports:", report.generator_supports)
    ok &= banner("omega preserved", report.omega_preserved)
    ok &= banner("output strictly unital", check_unitality(cat2).verdict == "strict")
    ok &= banner("output satisfies relations", check_relations(cat2).ok)

    res = check_functor(iso, max_arity=5)
    ok &= banner("iso (strict -> planted) passes check_functor", res.ok)
    lin = iso.components.get(1, {})
    id_lin = all(out == {tup[0]: f.of_int(1)} for tup, out in lin.items())
    ok &= banner("iso linear part is the identity", id_lin)

    # idempotence: rerun on the strict output
    cat3, iso2, report2 = nc.strictify_units(cat2, pairing)
    ok &= banner("second run is the identity transformation",
                 report2.identity and not report2.processed_orders)
    lin = iso2.components.get(1, {})
    id_lin = all(out == {tup[0]: f.of_int(1)} for tup, out in lin.items())
    ok &= banner("second iso has identity linear part", id_lin)

    print("ALL OK" if ok else "DRIVER FAILED")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

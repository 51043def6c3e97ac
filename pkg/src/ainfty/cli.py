"""Command-line workbench over the interchange documents.

Every subcommand reads documents, runs one pipeline stage, and emits a
single report document {verdict, witnesses, truncation, timings, payload}.
Exit codes: 0 the checked property holds, 1 it fails (witnesses included),
2 the input is invalid, 3 the truncation window cannot certify the request.
Timings are null unless --timings is given, so reports are byte-stable for
fixed inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import docio, repmod
from .ainf import StructureError, check_functor, check_relations, check_unitality
from .docio import DocumentError
from .field import FieldError, QQ
from .hochschild import (HochschildChainWindow, HochschildError, connes_B,
                         hh0_dimension, hochschild_b, windowed_homology)
from .localmodel import (LocalModelError, check_hn_type, euler_compare,
                         ext_quiver_halve, hn_enumerate, mc_presentation,
                         monic_equations, poly_str, verify_sigma)
from .nccalc import (NCError, certify_sigma_formality, solve_cyclic_pairing,
                     strictify_units)
from .nccalc import CyclicPairing
from .presentations import bar_ext_category, truncated_path_category
from .quiver import DGQuiverAlgebra, derived_preprojective
from .transfer import minimal_model

EXIT = {"pass": 0, "fail": 1, "error": 2, "truncated": 3}


class CliError(Exception):
    """Input-level problem that is not a schema violation."""


def _scalar(f, a):
    return f.scalar_to_json(a)


def _relation_witnesses(f, witnesses):
    out = []
    for arity, tup, lab, residual in witnesses:
        out.append({"arity": arity, "inputs": list(tup), "output": lab,
                    "residual": _scalar(f, residual)})
    return out


def _ext_dims(cat):
    rows = []
    for (i, j) in sorted(cat.hom):
        dims = {}
        for _, deg in cat.hom[(i, j)]:
            dims[deg] = dims.get(deg, 0) + 1
        rows.append({"src": i, "tgt": j,
                     "dims": [[deg, dims[deg]] for deg in sorted(dims)]})
    return rows


def _parse_dims(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CliError("--dims wants a comma-separated integer list, got %r" % text)


def _parse_zeta(text):
    try:
        return [Fraction(x) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise CliError("--zeta wants comma-separated rationals, got %r" % text)


def _load(path, *kinds):
    kind, obj = docio.load_document(path)
    if kinds and kind not in kinds:
        raise CliError("%s: got a %r document, want %s"
                       % (path, kind, " or ".join(repr(k) for k in kinds)))
    return kind, obj


# ---------------------------------------------------------------------------
# subcommand bodies: each returns (verdict, witnesses, truncation, payload)


def cmd_check_ainf(args):
    _, cat = _load(args.input, "ainf_category")
    rel = check_relations(cat, max_arity=args.order_cap)
    witnesses = _relation_witnesses(cat.field, rel.witnesses)
    payload = {"checked_arities": list(rel.checked),
               "units": None}
    if cat.units:
        unit_rep = check_unitality(cat)
        payload["units"] = unit_rep.verdict
    truncation = {"arities": list(rel.truncated)}
    return ("pass" if rel.ok else "fail"), witnesses, truncation, payload


def cmd_minimal_model(args):
    _, cat = _load(args.input, "ainf_category")
    try:
        model, incl, _ = minimal_model(cat, arity_cap=args.order_cap)
    except StructureError as e:
        raise CliError(str(e))
    rel = check_relations(model, max_arity=args.order_cap)
    fun = check_functor(incl, max_arity=args.order_cap)
    witnesses = _relation_witnesses(model.field, rel.witnesses)
    if not fun.ok:
        witnesses.append({"functor": [list(w) if isinstance(w, tuple) else str(w)
                                      for w in fun.witnesses[:4]]})
    payload = {"model": docio.to_document("ainf_category", model),
               "ext_dims": _ext_dims(model)}
    truncation = {"arities": sorted(set(rel.truncated) | set(fun.truncated))}
    verdict = "pass" if rel.ok and fun.ok else "fail"
    return verdict, witnesses, truncation, payload


def _pairing_for(args, cat):
    if getattr(args, "pairing", None):
        _, pairing = _load(args.pairing, "pairing")
        return pairing
    if cat.pairing:
        return CyclicPairing(field=cat.field, entries=dict(cat.pairing))
    return solve_cyclic_pairing(cat)


def cmd_strictify(args):
    _, cat = _load(args.input, "ainf_category")
    try:
        pairing = _pairing_for(args, cat)
        strict, iso, rep = strictify_units(cat, pairing, order_cap=args.order_cap)
    except NCError as e:
        return "fail", [{"reason": str(e)}], {}, {}
    fun = check_functor(iso, max_arity=args.order_cap)
    unit_rep = check_unitality(strict)
    payload = {"category": docio.to_document("ainf_category", strict),
               "processed_orders": list(rep.processed_orders),
               "omega_preserved": bool(rep.omega_preserved),
               "identity": bool(rep.identity),
               "units": unit_rep.verdict}
    witnesses = []
    ok = rep.omega_preserved and fun.ok and unit_rep.verdict == "strict"
    if not ok:
        witnesses.append({"functor_ok": fun.ok, "units": unit_rep.verdict,
                          "omega_preserved": rep.omega_preserved})
    return ("pass" if ok else "fail"), witnesses, {"arities": list(fun.truncated)}, payload


def _minimal_category_from(kind, obj, args):
    """quiver documents run the bar pipeline; category documents are used
    as given (minimized first when they carry a differential)."""
    if kind == "quiver":
        alg = derived_preprojective(obj)
        cat = bar_ext_category(alg, weight_cap=2, arity_cap=args.order_cap)
        model, _, _ = minimal_model(cat, arity_cap=args.order_cap)
        return model
    cat = obj
    if cat.op_table(1):
        model, _, _ = minimal_model(cat, arity_cap=args.order_cap)
        return model
    return cat


def cmd_formality(args):
    kind, obj = _load(args.input, "quiver", "ainf_category")
    if args.field != "QQ":
        raise CliError("formality runs over the rationals; --field %s unsupported"
                       % args.field)
    cat = _minimal_category_from(kind, obj, args)
    try:
        pairing = _pairing_for(args, cat)
    except NCError as e:
        return "fail", [{"reason": "no cyclic pairing: %s" % e}], {}, {}
    cert = certify_sigma_formality(cat, pairing)
    payload = {"certificate": {
        "ok": cert.ok,
        "profile": [[obj_, g] for obj_, g in sorted(cert.profile.items())],
        "checks": [[name, bool(ok), str(detail)] for name, ok, detail in cert.checks],
        "conclusion": cert.conclusion,
    }}
    if cert.ok:
        strict, _, _ = strictify_units(cat, pairing)
        payload["category"] = docio.to_document("ainf_category", strict)
    witnesses = [] if cert.ok else [
        {"check": name, "detail": str(detail)}
        for name, ok, detail in cert.checks if not ok]
    return ("pass" if cert.ok else "fail"), witnesses, {}, payload


def _stride(items, cap=60):
    step = max(1, len(items) // cap)
    return items[::step]


def cmd_hochschild(args):
    kind, obj = _load(args.input, "quiver", "dg_algebra", "ainf_category")
    if kind == "quiver":
        alg = DGQuiverAlgebra(obj, (), ())
        cat = truncated_path_category(alg, weight_cap=2)
    elif kind == "dg_algebra":
        cat = truncated_path_category(obj, weight_cap=2)
    else:
        cat = obj
    try:
        window = HochschildChainWindow(cat, args.window)
    except HochschildError as e:
        raise CliError(str(e))
    f = cat.field
    witnesses = []
    from .hochschild import _add as _hadd  # chain addition with cancellation

    def addc(a, b):
        out = dict(a)
        for k, c in b.items():
            _hadd(f, out, k, c)
        return out

    for n in range(1, args.window + 1):
        chains = window.basis(n) if n <= 2 else _stride(window.basis(n))
        for tup in chains:
            c = {tup: f.of_int(1)}
            if hochschild_b(window, hochschild_b(window, c)):
                witnesses.append({"identity": "b^2", "chain": list(tup)})
            if n + 2 <= args.window and connes_B(window, connes_B(window, c)):
                witnesses.append({"identity": "B^2", "chain": list(tup)})
            if n + 1 <= args.window:
                anti = addc(hochschild_b(window, connes_B(window, c)),
                            connes_B(window, hochschild_b(window, c)))
                if anti:
                    witnesses.append({"identity": "bB+Bb", "chain": list(tup)})
    hom = windowed_homology(window, length_margin=1)
    payload = {"hh0": hh0_dimension(window),
               "window": args.window,
               "homology": [[list(key), dim] for key, dim in sorted(hom.dims.items())]}
    truncation = {"stable": bool(hom.stable)}
    if args.window < 3:
        return "truncated", witnesses, truncation, payload
    return ("pass" if not witnesses else "fail"), witnesses, truncation, payload


def _reduce_if_requested(rep, args):
    f = docio.field_from_json(args.field, "flags.field")
    if f.p == 0 or rep.field.p == f.p:
        return rep, None
    if rep.field.p != 0:
        raise CliError("document is over fp:%d, cannot move to %s"
                       % (rep.field.p, args.field))
    reduced, reason = repmod.good_reduction(rep, f.p)
    if reduced is None:
        raise CliError("bad reduction mod %d: %s" % (f.p, reason))
    return reduced, "reduced mod %d" % f.p


def cmd_semisimplify(args):
    _, rep = _load(args.input, "matrix_rep")
    rep, note = _reduce_if_requested(rep, args)
    try:
        filt = repmod.radical_filtration(rep)
        ss = repmod.semisimplify(rep)
        again = repmod.semisimplify(ss)
    except repmod.RepError as e:
        raise CliError(str(e))
    idem = all(again.mats[a].entries == ss.mats[a].entries for a in ss.mats)
    dims_ok = ss.d == rep.d
    payload = {"rep": docio.to_document("matrix_rep", ss),
               "layer_dims": [dict(sorted(layer.items()))
                              for layer in filt.layer_dims()],
               "note": note}
    witnesses = []
    if not (idem and dims_ok):
        witnesses.append({"idempotent": idem, "dims_preserved": dims_ok})
    return ("pass" if not witnesses else "fail"), witnesses, {}, payload


def cmd_stability(args):
    _, rep = _load(args.input, "matrix_rep")
    rep, note = _reduce_if_requested(rep, args)
    values = _parse_zeta(args.zeta)
    try:
        zeta = repmod.StabilityParam.of(rep.quiver, values)
        report = repmod.semistable_bruteforce(rep, zeta)
    except repmod.RepError as e:
        raise CliError(str(e))
    payload = {"stability": report.verdict,
               "slope": QQ.scalar_to_json(report.slope),
               "note": note}
    witnesses = []
    if report.verdict == "unstable":
        payload["destabilizer_dims"] = dict(sorted(report.destabilizer_dims.items()))
        bases = {}
        for v in rep.quiver.vertices:
            rows = report.destabilizer.get(v, ())
            bases[v] = [list(row) for row in rows]
        payload["destabilizer"] = bases
        sub_slope = repmod.slope(report.destabilizer_dims, zeta)
        witnesses.append({"destabilizer_dims": dict(sorted(report.destabilizer_dims.items())),
                          "slope": QQ.scalar_to_json(sub_slope)})
    verdict = "pass" if report.verdict in ("stable", "semistable") else "fail"
    return verdict, witnesses, {}, payload


def cmd_moment_check(args):
    _, rep = _load(args.input, "matrix_rep")
    try:
        residuals = repmod.moment_map(rep)
    except (repmod.RepError, KeyError) as e:
        raise CliError("moment map needs a doubled-quiver representation: %s" % e)
    f = rep.field
    witnesses = []
    for v in rep.quiver.vertices:
        m = residuals.get(v)
        if m is not None and not m.is_zero():
            witnesses.append({"vertex": v,
                              "residual": [[r, c, _scalar(f, val)]
                                           for (r, c), val in sorted(m.entries.items())]})
    payload = {"vertices_checked": list(rep.quiver.vertices)}
    return ("pass" if not witnesses else "fail"), witnesses, {}, payload


def _equations_payload(pres):
    eqs = []
    for eq in monic_equations(pres):
        rows = [[poly_str(poly, pres.field) for poly in row] for row in eq.matrix]
        eqs.append({"label": eq.label, "src": eq.pair[0], "tgt": eq.pair[1],
                    "matrix": rows})
    return eqs


def cmd_local_model(args):
    _, cat = _load(args.input, "ainf_category")
    dims = _parse_dims(args.dims)
    cert = verify_sigma(cat)
    if not cert.verdict:
        return "fail", [{"profile": msg} for msg in cert.failures], {}, {}
    q = ext_quiver_halve(cert)
    fcert = None
    work = cat
    try:
        pairing = _pairing_for(args, cat)
        fcert = certify_sigma_formality(cat, pairing)
        if fcert.ok:
            work, _, _ = strictify_units(cat, pairing)
        else:
            fcert = None
    except NCError:
        fcert = None
    try:
        pres = mc_presentation(work, dims, certificate=fcert,
                               arity_cap=args.order_cap)
        euler = euler_compare(q, dims, work)
    except LocalModelError as e:
        return "fail", [{"reason": str(e)}], {}, {}
    payload = {"quiver": docio.to_document("quiver", q),
               "genus": [[obj, g] for obj, g in sorted(cert.genus.items())],
               "block_sizes": [[obj, pres.block_sizes[obj]]
                               for obj in pres.objects],
               "coordinates": [list(v) for v in pres.coordinates],
               "equations": _equations_payload(pres),
               "exactness": pres.exactness,
               "euler": {"lhs": euler.lhs, "rhs": euler.rhs,
                         "by_degree": [list(x) for x in euler.by_degree]}}
    truncation = {"exact": pres.exactness == "exact"}
    if pres.exactness != "exact":
        return "truncated", [], truncation, payload
    return "pass", [], truncation, payload


def cmd_euler_compare(args):
    _, cat = _load(args.input, "ainf_category")
    dims = _parse_dims(args.dims)
    cert = verify_sigma(cat)
    if not cert.verdict:
        return "fail", [{"profile": msg} for msg in cert.failures], {}, {}
    q = ext_quiver_halve(cert)
    try:
        rep = euler_compare(q, dims, cat)
    except LocalModelError as e:
        return "fail", [{"reason": str(e)}], {}, {}
    payload = {"lhs": rep.lhs, "rhs": rep.rhs,
               "by_degree": [list(x) for x in rep.by_degree],
               "quiver": docio.to_document("quiver", q)}
    return "pass", [], {}, payload


def cmd_hn_enum(args):
    _, query = _load(args.input, "hn_query")
    try:
        types = hn_enumerate(query.total, query.bound,
                             bogomolov_param=query.bogomolov_param(),
                             lattice=query.lattice)
    except LocalModelError as e:
        raise CliError(str(e))
    reverified = all(
        check_hn_type(query.total, query.bound, t,
                      bogomolov_param=query.bogomolov_param(),
                      lattice=query.lattice)
        for t in types)
    payload = {"count": len(types),
               "types": [[docio._poly_to_json(p) for p in t.polys]
                         for t in types],
               "reverified": reverified}
    return ("pass" if reverified else "fail"), [], {}, payload


HANDLERS = {
    "check-ainf": cmd_check_ainf,
    "minimal-model": cmd_minimal_model,
    "strictify": cmd_strictify,
    "formality": cmd_formality,
    "hochschild": cmd_hochschild,
    "semisimplify": cmd_semisimplify,
    "stability": cmd_stability,
    "moment-check": cmd_moment_check,
    "local-model": cmd_local_model,
    "euler-compare": cmd_euler_compare,
    "hn-enum": cmd_hn_enum,
}


# ---------------------------------------------------------------------------
# report assembly


def _flags_of(args):
    flags = {"order_cap": args.order_cap, "field": args.field, "seed": args.seed}
    for extra in ("dims", "zeta", "window", "pairing"):
        if getattr(args, extra, None) is not None:
            flags[extra] = getattr(args, extra)
    return flags


def build_report(subcommand, args, verdict, witnesses, truncation, payload,
                 wall_s=None):
    return {
        "kind": "report",
        "version": docio.SCHEMA_VERSION,
        "conventions": dict(docio.CONVENTIONS),
        "payload": {
            "subcommand": subcommand,
            "flags": _flags_of(args),
            "verdict": verdict,
            "witnesses": witnesses,
            "truncation": truncation,
            "timings": ({"wall_s": round(wall_s, 6)}
                        if args.timings and wall_s is not None else None),
            "result": payload,
        },
    }


def render_text(report):
    p = report["payload"]
    lines = ["%s: %s" % (p["subcommand"], p["verdict"])]
    for w in p["witnesses"]:
        lines.append("witness: %s" % json.dumps(w, sort_keys=True))
    if p["truncation"]:
        lines.append("truncation: %s" % json.dumps(p["truncation"], sort_keys=True))
    for key in sorted(p["result"]):
        val = p["result"][key]
        if isinstance(val, (str, int, bool)) or val is None:
            lines.append("%s: %s" % (key, val))
    return "\n".join(lines) + "\n"


def run_one(subcommand, args, input_path):
    args.input = input_path
    start = time.monotonic()
    try:
        verdict, witnesses, truncation, payload = HANDLERS[subcommand](args)
    except (DocumentError, CliError, FieldError) as e:
        verdict = "error"
        witnesses = [{"error": str(e)}]
        truncation, payload = {}, {}
    wall = time.monotonic() - start
    report = build_report(subcommand, args, verdict, witnesses, truncation,
                          payload, wall_s=wall)
    return EXIT[verdict], report


def emit(report, args, out_path=None):
    text = (docio.dumps_document(report) if args.output == "structured"
            else render_text(report))
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order-cap", type=int, default=6,
                        help="arity/order truncation cap (default 6)")
    common.add_argument("--field", default="QQ",
                        help='scalar field: "QQ" (default) or "fp:P"')
    common.add_argument("--seed", type=int, default=0,
                        help="seed recorded in the report, used by randomized paths")
    common.add_argument("--output", choices=("structured", "text"),
                        default="structured")
    common.add_argument("--report", default=None,
                        help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (breaks byte-stability)")

    parser = argparse.ArgumentParser(
        prog="ainfty",
        description="exact-arithmetic workbench for minimal models, "
                    "potentials, quiver moment maps and HN types")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, extra=()):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("input", help="input document (JSON)")
        for flag, kwargs in extra:
            p.add_argument(flag, **kwargs)
        return p

    add("check-ainf")
    add("minimal-model")
    add("strictify", [("--pairing", {"default": None,
                                     "help": "pairing document path"})])
    add("formality", [("--pairing", {"default": None})])
    add("hochschild", [("--window", {"type": int, "default": 3,
                                     "help": "chain length window (default 3)"})])
    add("semisimplify")
    add("stability", [("--zeta", {"required": True,
                                  "help": "comma-separated rationals, vertex order"})])
    add("moment-check")
    add("local-model", [("--dims", {"required": True,
                                    "help": "comma-separated multiplicities, object order"}),
                        ("--pairing", {"default": None})])
    add("euler-compare", [("--dims", {"required": True})])
    add("hn-enum")

    batch = sub.add_parser("batch", parents=[common])
    batch.add_argument("target", choices=sorted(HANDLERS),
                       help="subcommand to run on every file")
    batch.add_argument("directory", help="directory of input documents")
    batch.add_argument("--report-dir", default=None,
                       help="where to write per-file reports (default: alongside inputs)")
    batch.add_argument("--dims", default=None)
    batch.add_argument("--zeta", default=None)
    batch.add_argument("--window", type=int, default=3)
    batch.add_argument("--pairing", default=None)
    return parser


def run_batch(args):
    directory = Path(args.directory)
    if not directory.is_dir():
        sys.stderr.write("ainfty: %s is not a directory\n" % directory)
        return 2
    out_dir = Path(args.report_dir) if args.report_dir else directory
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for path in sorted(directory.glob("*.json")):
        if path.name.endswith(".report.json"):
            continue
        code, report = run_one(args.target, args, str(path))
        emit(report, args, out_path=out_dir / (path.stem + ".report.json"))
        worst = max(worst, code)
    return worst


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.subcommand == "batch":
        return run_batch(args)
    code, report = run_one(args.subcommand, args, args.input)
    emit(report, args, out_path=args.report)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

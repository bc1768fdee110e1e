"""Command-line interface.

Usage::

    gserre rho dual '0,1;+1'
    gserre perv enum --rho '0,1,2;+0' --n 2
    gserre griffith verify --rho '0,1,2;+0' --n 3 --horizon 10
    gserre model srho model.json --sheaf O --rho '0,1,2;+0' --format structured

Functions are written ``v0,v1,...,vH;+s``.  Non-canonical prefixes such as
``0,1;+1`` are accepted and trimmed.

Exit codes: 0 when every check passes (or for plain queries), 1 when a
mathematical check fails, is not applicable or is inconclusive, 2 for usage and
input errors.  Input diagnostics start with the invariant id, e.g.
``error: wprime.slope [0,2;+0]: jumps by 2 between 0 and 1``.

``--format structured`` prints one JSON document::

    {"schema": "gserre.cli/1", "command": "<group> <action>",
     "exit_code": <int>, "result": {...}}

Keys are sorted and the layout is fixed, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import griffith_examples as gx
from . import suites
from .decision_engine import ExtensionProblem, certify_extension, certify_srification, ic_defined
from .errors import InvariantViolation
from .perversity_calculus import (
    NumericalPerversity,
    enumerate_Pn_rho,
    exists_pi_plus_eq_rho,
    phi,
    phi_inverse,
    pi_max,
    pi_min,
    pi_plus,
)
from .rho_calculus import TailedFunction, dual, in_W, inclination, join, meet, w_violation, wprime_violation
from .scheme_model import (
    ModelBundle,
    ccodim,
    in_pD_ge0,
    in_pD_le0,
    induced_perversity,
    is_S_rho,
    load_bundle,
    locus_openness,
    s_rho_locus,
    standard_c,
    standard_s,
    triviality_warning,
)
from .verdict import Verdict

SCHEMA = "gserre.cli/1"
DEFAULT_ENUM_HORIZON = 8
DEFAULT_STRICT_HORIZON = 10


class UsageError(Exception):
    pass


@dataclass
class Output:
    code: int
    result: dict[str, Any]
    lines: list[str] = field(default_factory=list)


# -- argument helpers ----------------------------------------------------


def _func(text: str) -> TailedFunction:
    """Lenient parse: trims the prefix, enforces W'."""
    return TailedFunction.parse(text, canonical_only=False)


def _perv(text: str) -> NumericalPerversity:
    return NumericalPerversity(_func(text))


def _ids(text: str | None) -> frozenset[str] | None:
    if text is None:
        return None
    return frozenset(s.strip() for s in text.split(",") if s.strip())


def _load(path: str, validate_sheaves: bool = True) -> ModelBundle:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvariantViolation("model.json", f"{path}: {exc.msg} at line {exc.lineno}") from exc
    return load_bundle(data, validate_sheaves=validate_sheaves)


def _fmt(v) -> Any:
    return None if v == float("inf") else int(v)


def _verdict_output(verdict: Verdict, title: str) -> Output:
    lines = [f"{title}: {verdict.status.value}"]
    for clause, ok in sorted(verdict.clauses.items()):
        lines.append(f"  {clause}: {'ok' if ok else 'violated'}")
    for v in verdict.violations:
        need = "" if v.required is None else f" required {v.required}, actual {v.actual}"
        lines.append(f"  at {v.point}: {v.clause}{need} {v.detail}".rstrip())
    for key, value in sorted(verdict.data.items()):
        if key == "bound_table":
            lines.append("  bound table:")
            lines += [f"    {p}: depth >= {b}" for p, b in value.items()]
        elif not isinstance(value, (list, dict)) or key in ("locus", "open_set"):
            lines.append(f"  {key}: {_plain(value)}")
    return Output(0 if verdict.passed else 1, verdict.to_dict(), lines)


def _plain(value) -> str:
    if isinstance(value, list):
        return ",".join(map(str, value)) or "(empty)"
    if value is None:
        return "none"
    return str(value).lower() if isinstance(value, bool) else str(value)


# -- rho -----------------------------------------------------------------


def cmd_rho_eval(a) -> Output:
    f = _func(a.function)
    v = f(a.k)
    return Output(0, {"function": f.encode(), "k": a.k, "value": v}, [str(v)])


def cmd_rho_check(a) -> Output:
    f = TailedFunction.decode(a.function)
    wp, w = wprime_violation(f), w_violation(f)
    result = {
        "function": f.encode(),
        "in_Wprime": wp is None,
        "in_W": w is None and in_W(f),
        "diagnostic": None if w is None else w.code,
        "message": None if w is None else str(w),
        "target": a.target,
    }
    ok = result["in_W"] if a.target == "w" else result["in_Wprime"]
    lines = [f"{f.encode()}: W'={'yes' if wp is None else 'no'} W={'yes' if w is None else 'no'}"]
    if w is not None:
        lines.append(f"  {w}")
    return Output(0 if ok else 1, result, lines)


def _binary(op: Callable) -> Callable:
    def run(a) -> Output:
        f, g = _func(a.f), _func(a.g)
        h = op(f, g)
        return Output(0, {"f": f.encode(), "g": g.encode(), "value": h.encode()}, [h.encode()])

    return run


def cmd_rho_dual(a) -> Output:
    f = _func(a.function)
    d = dual(f)
    return Output(0, {"function": f.encode(), "value": d.encode()}, [d.encode()])


def cmd_rho_incline(a) -> Output:
    f = _func(a.function)
    t = inclination(f, a.n)
    return Output(0, {"function": f.encode(), "n": a.n, "value": t.encode()}, [t.encode()])


# -- perversities ------------------------------------------------------------


def cmd_perv_extreme(which: str) -> Callable:
    fn = pi_min if which == "min" else pi_max

    def run(a) -> Output:
        rho = _func(a.rho)
        p = fn(rho, a.n)
        return Output(0, {"rho": rho.encode(), "n": a.n, "value": p.encode()}, [p.encode()])

    return run


def cmd_perv_pplus(a) -> Output:
    p = _perv(a.pi)
    q = pi_plus(p, a.n)
    return Output(0, {"pi": p.encode(), "n": a.n, "value": q.encode()}, [q.encode()])


def cmd_perv_enum(a) -> Output:
    rho = _func(a.rho)
    found = [p.encode() for p in enumerate_Pn_rho(rho, a.n, a.horizon)]
    return Output(0, {"rho": rho.encode(), "n": a.n, "horizon": a.horizon, "count": len(found),
                      "elements": found}, found)


def cmd_perv_phi(a) -> Output:
    p = _perv(a.pi)
    v = phi(p)
    return Output(0, {"pi": p.encode(), "value": v.encode()}, [v.encode()])


def cmd_perv_phi_inv(a) -> Output:
    rho = _func(a.rho)
    low, high = phi_inverse(rho)
    return Output(0, {"rho": rho.encode(), "fibre": [low.encode(), high.encode()]},
                  [low.encode(), high.encode()])


def cmd_perv_exists_plus(a) -> Output:
    rho = _func(a.rho)
    ok = exists_pi_plus_eq_rho(rho, a.n)
    return Output(0, {"rho": rho.encode(), "n": a.n, "exists": ok}, ["yes" if ok else "no"])


# -- model files ---------------------------------------------------------


def cmd_model_validate(a) -> Output:
    b = _load(a.file)
    result = {
        "valid": True,
        "dim": b.model.dim,
        "components": list(b.model.components),
        "points": len(b.model.points),
        "sheaves": sorted(b.sheaves),
        "complexes": sorted(b.complexes),
    }
    lines = [
        f"valid: dim {b.model.dim}, {len(b.model.components)} component(s), {len(b.model.points)} point(s)",
        f"sheaves: {_plain(sorted(b.sheaves))}",
        f"complexes: {_plain(sorted(b.complexes))}",
    ]
    return Output(0, result, lines)


def cmd_model_ccodim(a) -> Output:
    b = _load(a.file)
    if (a.open is None) == (a.closed is None):
        raise UsageError("give exactly one of --open and --closed")
    Z = b.model.complement(_ids(a.open)) if a.open is not None else _ids(a.closed)
    _check_ids(b, Z)
    n = _fmt(ccodim(b.model, Z))
    result = {"closed": sorted(Z), "ccodim": n}
    lines = [f"ccodim: {'inf' if n is None else n}"]
    if a.open is not None:
        warning = triviality_warning(b.model, _ids(a.open))
        result["warning"] = warning
        if warning:
            lines.append(f"warning: {warning}")
    return Output(0, result, lines)


def _check_ids(b: ModelBundle, ids) -> None:
    for pid in sorted(ids):
        if pid not in b.model.points:
            raise InvariantViolation("open.unknown-point", "not a point of the model", pid)


def cmd_model_srho(a) -> Output:
    b = _load(a.file)
    return _verdict_output(is_S_rho(b.sheaf(a.sheaf), _func(a.rho), b.model), f"S_rho {a.sheaf}")


def cmd_model_srho_locus(a) -> Output:
    b = _load(a.file)
    rho = _func(a.rho)
    locus = s_rho_locus(b.sheaf(a.sheaf), rho, b.model)
    bad = locus_openness(b.model, locus)
    result = {"rho": rho.encode(), "locus": sorted(locus), "open": not bad,
              "non_open_witnesses": [list(p) for p in bad]}
    lines = [f"locus: {_plain(sorted(locus))}", f"open: {_plain(not bad)}"]
    lines += [f"  {x} lies in the locus but its generization {g} does not" for x, g in bad]
    return Output(0, result, lines)


def cmd_model_membership(a) -> Output:
    b = _load(a.file)
    if (a.sheaf is None) == (a.complex is None):
        raise UsageError("give exactly one of --sheaf and --complex")
    F = b.sheaf(a.sheaf).embed() if a.sheaf is not None else b.complex(a.complex)
    if a.pi is not None:
        p = induced_perversity(_perv(a.pi), b.model)
        source = _perv(a.pi).encode()
    elif a.standard is not None:
        if a.open is None:
            raise UsageError("--standard needs --open")
        p = (standard_s if a.standard == "s" else standard_c)(b.model, _ids(a.open))
        source = f"standard-{a.standard}"
    else:
        raise UsageError("give --pi or --standard")
    le, ge = in_pD_le0(F, p, b.model), in_pD_ge0(F, p, b.model)
    want = {"le": le, "ge": ge, "heart": le and ge}[a.half]
    result = {"perversity": source, "values": dict(sorted(p.items())), "in_D_le0": le, "in_D_ge0": ge,
              "half": a.half, "member": want}
    lines = [f"perversity: {source}", f"D<=0: {_plain(le)}", f"D>=0: {_plain(ge)}"]
    return Output(0 if want else 1, result, lines)


# -- example family -------------------------------------------------------


def _spec(a) -> gx.GriffithSpec:
    return gx.d_sequence(_func(a.rho), a.n)


def cmd_griffith_spec(a) -> Output:
    s = _spec(a)
    t = inclination(s.rho, s.n)
    result = s.to_dict() | {"inclination": t.encode()}
    lines = [f"d = {list(s.d)}", f"e = {list(s.e)}", f"r = {list(s.r)}", f"inclination = {t.encode()}"]
    return Output(0, result, lines)


def cmd_griffith_profile(a) -> Output:
    prof = gx.build_profile(_spec(a))
    lines = [f"{p.codim} {p.depth} {p.stratum}" for p in prof.points]
    return Output(0, prof.to_dict(), lines)


def cmd_griffith_verify(a) -> Output:
    s = _spec(a)
    if a.horizon < s.n + 2:
        raise UsageError(f"--horizon must be at least n + 2 = {s.n + 2}")
    prof = gx.build_profile(s)
    t = inclination(s.rho, s.n)
    holds = gx.profile_is_S(prof, t)
    report = gx.strictness_check(s, a.horizon)
    ok = holds and report.passed
    result = report.to_dict() | {"horizon": a.horizon, "inclination_holds": holds, "passed": ok}
    lines = [
        f"S_{t.encode()} on profile: {'holds' if holds else 'fails'}",
        f"strictly larger conditions checked: {report.checked}, exceptions: {len(report.exceptions)}",
    ]
    lines += [f"  not violated: {f.encode()}" for f in report.exceptions]
    return Output(0 if ok else 1, result, lines)


def cmd_griffith_export(a) -> Output:
    model, sheaf, smooth = gx.export_model(_spec(a))
    doc = model.to_dict() | {"sheaves": {"O": sheaf.to_dict()}, "smooth": sorted(smooth)}
    text = json.dumps(doc, indent=2, sort_keys=True)
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        return Output(0, {"written": a.output, "points": len(model.points)},
                      [f"wrote {a.output} ({len(model.points)} points)"])
    return Output(0, doc, text.splitlines())


# -- certificates ------------------------------------------------------------


def cmd_certify_extension(a) -> Output:
    b = _load(a.file, validate_sheaves=False)
    U = _ids(a.open)
    _check_ids(b, U)
    problem = ExtensionProblem(b.model, U, b.sheaf(a.pushforward).restrict(U), _func(a.rho))
    if a.candidate is None:
        return _verdict_output(ic_defined(problem), "extension defined")
    return _verdict_output(certify_extension(problem, b.sheaf(a.candidate)), "extension")


def cmd_certify_srification(a) -> Output:
    b = _load(a.file)
    cand = b.sheaf(a.candidate) if a.candidate is not None else None
    verdict = certify_srification(b.model, b.sheaf(a.sheaf), _func(a.rho), cand, _ids(a.open))
    return _verdict_output(verdict, "S_rho-ification")


# -- acceptance suites ------------------------------------------------------


def _suite_runner(name: str, a) -> list[suites.SuiteResult]:
    h = a.horizon
    table = {
        "prop33": lambda: suites.prop33(h or 8),
        "duality": lambda: [suites.duality(h or 10)],
        "prho-paths": lambda: [suites.prho_paths(h or 8)],
        "griffith-suite": lambda: [suites.griffith_suite(h or 6), suites.griffith_golden()],
        "bridge": lambda: [suites.bridge(a.count)],
        "monotonicity": lambda: [suites.monotonicity(a.count)],
        "rejections": lambda: [suites.rejections()],
    }
    if name == "all":
        return [r for key in table for r in table[key]()]
    return table[name]()


VERIFY_SUITES = ("prop33", "duality", "prho-paths", "griffith-suite", "bridge", "monotonicity", "rejections",
                 "all")


def cmd_verify(a) -> Output:
    results = _suite_runner(a.suite, a)
    lines = []
    for r in results:
        lines.append(r.line())
        lines += [f"  {e}" for e in r.exceptions[: suites.MAX_REPORTED]]
    ok = all(r.passed for r in results)
    # timings vary between runs, keep them out of the stable output
    return Output(0 if ok else 1, {"passed": ok, "suites": [r.to_dict() for r in results]}, lines)


# -- parser --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "structured"), default=argparse.SUPPRESS,
                        help="output format (default: table)")

    ap = _Parser(prog="gserre", description="Generalized Serre conditions: checks and certificates.",
                 parents=[common])
    groups = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(sub, name, handler, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    rho = groups.add_parser("rho", help="functions in W' and W").add_subparsers(dest="action", required=True)
    p = leaf(rho, "eval", cmd_rho_eval, "value at k")
    p.add_argument("function")
    p.add_argument("k", type=int)
    p = leaf(rho, "check", cmd_rho_check, "membership in W' and W")
    p.add_argument("function")
    p.add_argument("--target", choices=("w", "wprime"), default="w")
    for name, op in (("join", join), ("meet", meet)):
        p = leaf(rho, name, _binary(op), f"pointwise {'max' if name == 'join' else 'min'}")
        p.add_argument("f")
        p.add_argument("g")
    p = leaf(rho, "dual", cmd_rho_dual, "dual condition")
    p.add_argument("function")
    p = leaf(rho, "incline", cmd_rho_incline, "largest element of W agreeing on [0, n]")
    p.add_argument("function")
    p.add_argument("--n", type=int, required=True)

    perv = groups.add_parser("perv", help="numerical perversities").add_subparsers(dest="action", required=True)
    for name, which in (("pmin", "min"), ("pmax", "max")):
        p = leaf(perv, name, cmd_perv_extreme(which), f"{which}imal element of P_n(rho)")
        p.add_argument("--rho", required=True)
        p.add_argument("--n", type=int, required=True)
    p = leaf(perv, "pplus", cmd_perv_pplus, "plus-shift at level n")
    p.add_argument("--pi", required=True)
    p.add_argument("--n", type=int, required=True)
    p = leaf(perv, "enum", cmd_perv_enum, "brute-force P_n(rho)")
    p.add_argument("--rho", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--horizon", type=int, default=DEFAULT_ENUM_HORIZON,
                   help=f"prefix horizon of candidates (default {DEFAULT_ENUM_HORIZON})")
    p = leaf(perv, "phi", cmd_perv_phi, "map a level-2 perversity to W")
    p.add_argument("--pi", required=True)
    p = leaf(perv, "phi-inv", cmd_perv_phi_inv, "two-element fibre over rho")
    p.add_argument("--rho", required=True)
    p = leaf(perv, "exists-plus", cmd_perv_exists_plus, "is rho a plus-shift of some pi in P_n(rho)")
    p.add_argument("--rho", required=True)
    p.add_argument("--n", type=int, required=True)

    model = groups.add_parser("model", help="point models from JSON").add_subparsers(dest="action", required=True)
    p = leaf(model, "validate", cmd_model_validate, "check a model file")
    p.add_argument("file")
    p = leaf(model, "ccodim", cmd_model_ccodim, "c-codimension of a closed set")
    p.add_argument("file")
    p.add_argument("--open", help="comma-separated open set; its complement is used")
    p.add_argument("--closed", help="comma-separated closed set")
    p = leaf(model, "srho", cmd_model_srho, "S_rho check of a sheaf")
    p.add_argument("file")
    p.add_argument("--sheaf", required=True)
    p.add_argument("--rho", required=True)
    p = leaf(model, "srho-locus", cmd_model_srho_locus, "pointwise S_rho locus and its openness")
    p.add_argument("file")
    p.add_argument("--sheaf", required=True)
    p.add_argument("--rho", required=True)
    p = leaf(model, "membership", cmd_model_membership, "perverse t-structure membership")
    p.add_argument("file")
    p.add_argument("--sheaf")
    p.add_argument("--complex")
    p.add_argument("--pi", help="numerical perversity, applied by codimension")
    p.add_argument("--standard", choices=("s", "c"), help="minimal or maximal standard perversity")
    p.add_argument("--open", help="open set for --standard")
    p.add_argument("--half", choices=("le", "ge", "heart"), default="heart")

    grif = groups.add_parser("griffith", help="strictly-S_rho example family").add_subparsers(
        dest="action", required=True)
    for name, handler, text in (
        ("spec", cmd_griffith_spec, "d, e, r sequences"),
        ("profile", cmd_griffith_profile, "(codim, depth) pairs"),
        ("verify", cmd_griffith_verify, "S_(t_n rho) holds and every larger condition fails"),
        ("export-model", cmd_griffith_export, "point model realizing the profile"),
    ):
        p = leaf(grif, name, handler, text)
        p.add_argument("--rho", required=True)
        p.add_argument("--n", type=int, required=True)
        if name == "verify":
            p.add_argument("--horizon", type=int, default=DEFAULT_STRICT_HORIZON,
                           help=f"prefix horizon of competing conditions (default {DEFAULT_STRICT_HORIZON})")
        if name == "export-model":
            p.add_argument("--output", help="write JSON here instead of stdout")

    cert = groups.add_parser("certify", help="certificate checks").add_subparsers(dest="action", required=True)
    p = leaf(cert, "extension", cmd_certify_extension, "S_rho-extension certificate")
    p.add_argument("file")
    p.add_argument("--open", required=True)
    p.add_argument("--pushforward", required=True, help="sheaf name; only its stalks on the open set are used")
    p.add_argument("--rho", required=True)
    p.add_argument("--candidate", help="sheaf name; without it only definedness is checked")
    p = leaf(cert, "srification", cmd_certify_srification, "finite S_rho-ification certificate")
    p.add_argument("file")
    p.add_argument("--sheaf", required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--candidate")
    p.add_argument("--open", help="defaults to the largest open subset of the S_rho locus")

    ver = groups.add_parser("verify", help="exhaustive and randomized acceptance suites").add_subparsers(
        dest="action", required=True)
    for name in VERIFY_SUITES:
        p = leaf(ver, name, cmd_verify, f"run the {name} suite")
        p.set_defaults(suite=name)
        p.add_argument("--horizon", type=int, help="override the suite's enumeration horizon")
        p.add_argument("--count", type=int, default=1000, help="randomized models (default 1000)")
    return ap


def _emit(out: Output, command: str, fmt: str, stream) -> None:
    if fmt == "structured":
        doc = {"schema": SCHEMA, "command": command, "exit_code": out.code, "result": out.result}
        stream.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        for line in out.lines:
            stream.write(line + "\n")


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    fmt, command = "table", ""
    try:
        args = build_parser().parse_args(argv)
        fmt = getattr(args, "format", "table")
        command = f"{args.group} {args.action}"
        out = args.handler(args)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    except InvariantViolation as exc:
        if fmt == "structured":
            err = Output(2, {"error": {"code": exc.code, "subject": exc.subject, "message": str(exc)}})
            _emit(err, command, fmt, stdout)
        stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    _emit(out, command, fmt, stdout)
    return out.code


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()

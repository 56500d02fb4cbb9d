"""Command-line front end.

    gaugeccr <command> <scenario> [<scenario> ...] [--format text|json]
             [--fail-on-nonlocal] [--parallel N] [--fixtures-dir DIR]

A scenario is a path or the name of a bundled fixture. Exit codes: 0 done,
1 I/O or parse error, 2 validation failure, 3 analysis precondition
failure, 4 non-local verdict (only with ``--fail-on-nonlocal``).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .cech import cohomology, compact_support_group, lattice_in_real
from .cyclotomic import CyclotomicScalar
from .exact_linear import Matrix, as_fraction, format_rational, matrix_from_json, rank
from .gauge_model import (
    GAUGE_EQUIVALENT,
    NO_OBSTRUCTION,
    Configuration,
    HKError,
    build_observable_model,
    hk_quotient,
    induced_observable_morphism,
    locality_check,
    nogo_run,
    separate_configurations,
    topological_charge,
)
from .presymplectic import MixedGroup, PresymplecticGroup, center, radical
from .scenario import (
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
)
from .weyl_ccr import (
    WeylElement,
    banach_norm_certified,
    commutator_check,
    ideal_unit_certificate,
    is_central_symbol,
    sum_abs_squared,
    trivial_state_eval,
    weyl_star,
)

COMMANDS = ("validate", "cohomology", "model", "locality", "nogo", "hk", "separate", "weyl-eval")

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_PRECONDITION, EXIT_NONLOCAL = 0, 1, 2, 3, 4


class PreconditionError(ValueError):
    pass


def _vec(v) -> list:
    return [format_rational(x) for x in v]


def _check(name: str, ok: bool) -> dict:
    return {"check": name, "ok": bool(ok)}


def _policy_notes(scenario, names) -> list:
    notes = []
    for n in sorted(set(names)):
        obj = scenario.objects[n]
        if isinstance(obj.rho, str) and obj.rho == "zero" and obj.b1 and obj.charge_dim:
            notes.append(f"object {n} uses the zero holonomy policy")
    return notes


def _analysis_args(scenario, command: str) -> list:
    return [a.get("arguments", {}) for a in scenario.analyses if a.get("command") == command]


# ----------------------------------------------------------------------
# Analyses
# ----------------------------------------------------------------------


def _run_validate(scenario):
    results = {
        "objects": sorted(scenario.objects),
        "morphisms": sorted(scenario.morphisms),
        "analyses": len(scenario.analyses),
        "valid": True,
    }
    return [results], [_check("all objects built and morphisms compatible", True)], []


def _run_cohomology(scenario):
    out, checks = [], []
    targets = [a["object"] for a in _analysis_args(scenario, "cohomology") if "object" in a] or sorted(scenario.objects)
    for name in targets:
        X = scenario.objects[name].space
        groups = []
        for k in range(X.dim_m + 1):
            H = cohomology(X, k)
            groups.append({
                "degree": k,
                "free_rank": H.rank,
                "torsion": list(H.torsion),
                "component_ranks": list(H.component_ranks),
            })
            if H.representatives is not None:
                d = X.body.coboundary(k)
                checks.append(_check(f"{name}: degree {k} representatives are cocycles",
                                     (d @ H.representatives).is_zero()))
        h2c = compact_support_group(X, 2)
        out.append({
            "object": name,
            "dim_m": X.dim_m,
            "groups": groups,
            "lattice_h1": lattice_in_real(X, 1).to_json(),
            "h2c_dim": h2c.dimension,
        })
    return out, checks, []


def _run_model(scenario):
    out, checks = [], []
    targets = [a["object"] for a in _analysis_args(scenario, "model") if "object" in a] or sorted(scenario.objects)
    for name in targets:
        M = build_observable_model(scenario.objects[name])
        rad, cen = radical(M.pag), center(M.pag)
        d = M.to_json()
        d["radical"] = rad.to_json()
        d["center"] = cen.to_json()
        out.append(d)
        checks.append(_check(f"{name}: radical inside center", rad.is_subgroup_of(cen)))
        checks.append(_check(f"{name}: pairing antisymmetric", M.pag.S.T == -M.pag.S))
    return out, checks, _policy_notes(scenario, targets)


def _run_locality(scenario):
    out, checks, names = [], [], []
    targets = [a["morphism"] for a in _analysis_args(scenario, "locality") if "morphism" in a] or list(scenario.morphisms)
    for fname in targets:
        f = scenario.morphisms[fname]
        rep = locality_check(f)
        d = rep.to_json()
        d["morphism"] = fname
        d["induced"] = induced_observable_morphism(f).T.to_json()
        out.append(d)
        names += [f.source.name, f.target.name]
        checks.append(_check(f"{fname}: criterion and model agree", rep.criterion_agrees))
        checks.append(_check(f"{fname}: kernel inside radical", rep.kernel_in_radical))
    return out, checks, _policy_notes(scenario, names)


def _run_nogo(scenario):
    diagrams = _analysis_args(scenario, "nogo")
    if not diagrams:
        raise PreconditionError("scenario declares no no-go diagram")
    out, checks, names = [], [], []
    for args in diagrams:
        f1, f2 = scenario.morphisms[args["f1"]], scenario.morphisms[args["f2"]]
        cert = nogo_run(f1, f2)
        names += [f1.source.name, f1.target.name, f2.target.name]
        if cert == NO_OBSTRUCTION:
            out.append({"f1": args["f1"], "f2": args["f2"], "result": NO_OBSTRUCTION})
            continue
        d = cert.to_json()
        d.update({"f1": args["f1"], "f2": args["f2"], "result": "obstruction",
                  "far_group": cert.far.pag.to_json()})
        out.append(d)
        checks.append(_check(f"{args['f1']}/{args['f2']}: certificate re-verifies", cert.verify()))
    return out, checks, _policy_notes(scenario, names)


def _run_hk(scenario):
    if scenario.terminal is None:
        raise PreconditionError("hk needs a terminal object")
    t = scenario.terminal
    legs, others = {}, []
    for f in scenario.morphisms.values():
        if f.target.name == t and f.source.name != t:
            if f.source.name in legs:
                raise PreconditionError(f"object {f.source.name} has two morphisms to the terminal object")
            legs[f.source.name] = f
        elif f.source.name != t:
            others.append(f)
    try:
        rep = hk_quotient(scenario.objects, legs, others, t)
    except HKError as exc:
        raise PreconditionError(str(exc)) from exc
    checks = [
        _check("every kernel inside its radical", rep.all_kernels_radical),
        _check("every induced quotient morphism injective", rep.all_injective),
        _check("report re-verifies", rep.verify()),
    ]
    return [rep.to_json()], checks, _policy_notes(scenario, scenario.objects)


def _config(d) -> Configuration:
    return Configuration(tuple(d.get("curvature", [])), tuple(d.get("holonomy", [])))


def _run_separate(scenario):
    out, checks = [], []
    for args in _analysis_args(scenario, "separate"):
        for i, pair in enumerate(args.get("pairs", [])):
            a, b = _config(pair["a"]), _config(pair["b"])
            res = separate_configurations(a, b)
            if res == GAUGE_EQUIVALENT:
                out.append({"pair": i, "result": GAUGE_EQUIVALENT})
            else:
                gap = res.gap(a, b)
                out.append({"pair": i, "result": res.to_json(), "gap": format_rational(gap)})
                checks.append(_check(f"pair {i}: gap not integral", gap.denominator != 1))
    if not out:
        raise PreconditionError("scenario declares no configuration pairs")
    return out, checks, []


def _scalar(v):
    if isinstance(v, dict):
        return CyclotomicScalar.from_json(v)
    return CyclotomicScalar.rational(as_fraction(v))


def _eval_expression(expr: str, elements: dict, group) -> WeylElement:
    result = WeylElement.unit(group)
    for factor in expr.replace(" ", "").split("*"):
        if factor.startswith("star(") and factor.endswith(")"):
            result = result * weyl_star(elements[factor[5:-1]])
        elif factor in elements:
            result = result * elements[factor]
        else:
            raise PreconditionError(f"unknown factor {factor!r} in {expr!r}")
    return result


def _run_weyl(scenario):
    out, checks = [], []
    blocks = _analysis_args(scenario, "weyl-eval")
    if not blocks:
        raise PreconditionError("scenario declares no Weyl evaluations")
    for args in blocks:
        model = build_observable_model(scenario.objects[args["object"]])
        B = model.pag
        elements = {}
        for name, terms in sorted(args.get("elements", {}).items()):
            try:
                elements[name] = WeylElement.from_terms(
                    B, [(t["group_element"], _scalar(t.get("coeff", 1))) for t in terms]
                )
            except ValueError as exc:
                raise PreconditionError(f"element {name}: {exc}") from exc
        evals = []
        for expr in args.get("expressions", []):
            x = _eval_expression(expr, elements, B)
            norm, exact = banach_norm_certified(x)
            omega = trivial_state_eval(weyl_star(x) * x)
            evals.append({
                "expression": expr,
                "result": x.to_json(),
                "banach_norm": format_rational(norm),
                "norm_exact": exact,
                "trivial_state": trivial_state_eval(x).to_json(),
                "state_of_square": omega.to_json(),
            })
            checks.append(_check(f"{expr}: state of x*x equals sum of |alpha|^2", omega == sum_abs_squared(x)))
        charges = []
        if args.get("topological_charges"):
            for k in range(model.c):
                W = topological_charge(model, k)
                b = W.terms[0][0]
                central = is_central_symbol(B, b)
                charges.append({"index": k, "element": _vec(b), "central": central})
                checks.append(_check(f"charge {k}: commutators agree with center", central == commutator_check(B, b)))
        out.append({"object": args["object"], "evaluations": evals, "topological_charges": charges,
                    "group": B.to_json()})
    return out, checks, []


RUNNERS = {
    "validate": _run_validate,
    "cohomology": _run_cohomology,
    "model": _run_model,
    "locality": _run_locality,
    "nogo": _run_nogo,
    "hk": _run_hk,
    "separate": _run_separate,
    "weyl-eval": _run_weyl,
}


def run(ref: str, command: str, fixtures_dir=None) -> tuple[dict, int]:
    """Build the report for one scenario; returns ``(report, exit code)``."""
    report = {"command": command, "scenario": ref}
    try:
        scenario = load_scenario(ref, fixtures_dir)
    except (OSError, ScenarioParseError) as exc:
        report["error"] = {"kind": "io_or_parse", "message": str(exc)}
        return report, EXIT_IO
    except ScenarioValidationError as exc:
        report["error"] = {"kind": exc.kind, "entity": exc.entity, "message": exc.message}
        return report, EXIT_VALIDATION
    report["scenario"] = scenario.name
    report["scenario_sha256"] = scenario.digest
    try:
        results, checks, notes = RUNNERS[command](scenario)
    except (PreconditionError, KeyError, ValueError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) else f"unknown name {exc}"
        report["error"] = {"kind": "precondition", "message": msg}
        return report, EXIT_PRECONDITION
    report["results"] = results
    report["verification"] = checks
    report["notes"] = notes
    return report, EXIT_OK


# ----------------------------------------------------------------------
# Independent re-checks of a finished report
# ----------------------------------------------------------------------


def _m(rows, r=None, c=None) -> Matrix:
    return matrix_from_json(rows, r, c)


def _group(d: dict) -> PresymplecticGroup:
    n = d["ambient_dim"]
    g = MixedGroup.from_generators(n, d["free_gens"], d["divisible_gens"])
    return PresymplecticGroup(g, _m(d["S"], n, n))


def verify_report(report: dict) -> list:
    """Re-check stored matrices and certificates without rerunning analyses."""
    out = []
    cmd = report.get("command")
    for res in report.get("results", []):
        if cmd == "locality":
            P = _m(res["pushforward"], *res["h2c_dims"][::-1])
            out.append(("pushforward injectivity", (rank(P) == P.cols) == res["pushforward_injective"]))
            T = _m(res["induced"])
            K = res["kernel"]
            gens = K["free_gens"] + K["divisible_gens"]
            out.append(("kernel maps to zero", all(not any(T.apply([as_fraction(x) for x in g])) for g in gens)
                        if T.rows and T.cols else True))
            out.append(("verdict matches kernel", res["model_injective"] == (not gens)))
        elif cmd == "nogo" and res.get("result") == "obstruction":
            F = _group(res["far_group"])
            phi = [as_fraction(x) for x in res["image"]]
            psi = [as_fraction(x) for x in res["psi"]]
            cert = ideal_unit_certificate(F, phi, psi)
            out.append(("ideal steps re-verify", cert.verify()))
            out.append(("scalar matches", cert.scalar.to_json() == res["ideal_certificate"]["scalar"]))
            T2 = _m(res["T2"])
            K = res["kernel"]
            gens = K["free_gens"] + K["divisible_gens"]
            out.append(("kernel maps to zero under f2", all(not any(T2.apply([as_fraction(x) for x in g])) for g in gens)
                        if T2.rows and T2.cols else True))
        elif cmd == "hk":
            for o in res["objects"]:
                P = _m(o["projection"])
                K = o["material_charges"]
                gens = K["free_gens"] + K["divisible_gens"]
                ok = all(not any(P.apply([as_fraction(x) for x in g])) for g in gens) if P.rows else True
                out.append((f"{o['name']}: projection kills material charges", ok))
            out.append(("all induced injective", all(m["injective"] for m in res["morphisms"])))
    out += [(c["check"], c["ok"]) for c in report.get("verification", [])]
    return out


# ----------------------------------------------------------------------
# Rendering
# ----------------------------------------------------------------------


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _render_text(obj, indent: int, lines: list):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                _render_text(v, indent + 1, lines)
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            lines.append(f"{pad}{json.dumps(obj)}")
            return
        for x in obj:
            if isinstance(x, dict):
                lines.append(f"{pad}-")
                _render_text(x, indent + 1, lines)
            else:
                lines.append(f"{pad}- {json.dumps(x)}")


def render_text(report: dict) -> str:
    lines: list = []
    _render_text(report, 0, lines)
    return "\n".join(lines) + "\n"


def _is_nonlocal(report: dict) -> bool:
    return report.get("command") == "locality" and any(
        not r.get("model_injective", True) for r in report.get("results", [])
    )


def _job(args):
    ref, command, fixtures_dir = args
    return run(ref, command, fixtures_dir)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gaugeccr", description="Gauge observable algebras on region models.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("scenarios", nargs="+", help="scenario file or bundled fixture name")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--fail-on-nonlocal", action="store_true")
    parser.add_argument("--parallel", type=int, default=1, metavar="N")
    parser.add_argument("--fixtures-dir", default=None)
    args = parser.parse_args(argv)

    jobs = [(ref, args.command, args.fixtures_dir) for ref in args.scenarios]
    if args.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]

    render = render_json if args.format == "json" else render_text
    code = EXIT_OK
    for report, rc in results:
        sys.stdout.write(render(report))
        if rc == EXIT_OK and args.fail_on_nonlocal and _is_nonlocal(report):
            rc = EXIT_NONLOCAL
        code = max(code, rc)
    return code


if __name__ == "__main__":
    sys.exit(main())

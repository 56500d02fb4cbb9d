"""Run every bundled fixture through the analyses it exercises and summarise the verdicts.

    python scripts/run_fixtures.py [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import sys

from gaugeccr.cli import render_json, run, verify_report

PLAN = [
    ("prop48_m2", "locality"),
    ("prop48_m3", "locality"),
    ("prop48_m4", "locality"),
    ("twodim_connected", "locality"),
    ("thm410_m3", "nogo"),
    ("thm410_m2", "nogo"),
    ("hk_minkowski", "hk"),
    ("thm410_m3", "separate"),
    ("thm410_m3", "weyl-eval"),
]


def summarise(command: str, results: list) -> str:
    if command == "locality":
        return "; ".join(f"{r['morphism']}: dims {tuple(r['h2c_dims'])} {r['verdict']}" for r in results)
    if command == "nogo":
        r = results[0]
        if r.get("result") != "obstruction":
            return r.get("result", "?")
        return f"lambda={r['lambda']} pairing={r['pairing_over_2pi']} scalar={r['ideal_certificate']['scalar']['coeffs']}"
    if command == "hk":
        r = results[0]
        inj = all(m["injective"] for m in r["morphisms"])
        return f"{len(r['morphisms'])} induced morphisms, all injective={inj}"
    if command == "separate":
        return "; ".join(str(r["result"]) if isinstance(r["result"], str) else json.dumps(r["result"], sort_keys=True) for r in results)
    return f"{len(results)} results"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--json", help="write all reports to this file")
    args = parser.parse_args(argv)
    reports, failures = [], 0
    for fixture, command in PLAN:
        report, code = run(fixture, command)
        checks = verify_report(report) if code == 0 else []
        ok = code == 0 and all(c for _, c in checks)
        failures += not ok
        detail = summarise(command, report["results"]) if code == 0 else report["error"]["message"]
        print(f"[{'ok' if ok else 'FAILED'}] {fixture:18s} {command:10s} {detail}")
        reports.append(report)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(render_json({"reports": reports}))
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Run every falsification audit and print the witnesses it found.

Covers the exhaustive mixture falsifier for both agent-only heads, the
tie-splitting demonstration against the times-map, descending chains
against three planted candidate maps into the doubly-randomized corner,
and the counting audit that pigeonholes seven exact mixture values into
the five-slot integer range.  Exits nonzero if any audit fails to exhibit
its contradiction.

Usage:
    python scripts/run_audits.py [--depth 2] [--horizon 4] [--chain 6]
                                 [--mixtures 6] [--json out.json]
"""

import argparse
import sys

from rlxlate.audit import (
    build_descending_chain,
    candidate_translation,
    cardinality_audit,
    demo_nonstrong_times_map,
    falsify_mixture,
)
from rlxlate.cli import canonical_json, catalog_translation, diamond_base
from rlxlate.translations import diamond_specs

PLANTED = (("identity", "mode"), ("dilution", "mode"), ("identity", "zero"))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=2)
    ap.add_argument("--horizon", type=int, default=4)
    ap.add_argument("--chain", type=int, default=6)
    ap.add_argument("--mixtures", type=int, default=6)
    ap.add_argument("--json", default=None, help="also dump reports here")
    args = ap.parse_args(argv)

    reports = {}
    ok = True

    for token in ("drop-first-action:a0", "sum-map"):
        t = catalog_translation(token, args.depth, args.horizon)
        rep = falsify_mixture(t)
        reports[f"mixture[{token}]"] = rep.to_json()
        good = rep.outcome == "contradiction_exhibited"
        ok &= good
        print(f"mixture falsifier  {token:<22} {rep.outcome}  "
              f"({rep.details['family_size']} candidates, "
              f"all violated: {all(r['violated_pair'] for r in rep.details['candidates'])})")

    prepend = catalog_translation("prepend-percept:n0", args.depth, args.horizon)
    times = catalog_translation("times-map", args.depth, args.horizon)
    rep = demo_nonstrong_times_map(prepend, times)
    reports["times-demo"] = rep.to_json()
    ok &= rep.outcome == "contradiction_exhibited"
    print(f"tie splitting      times-map              {rep.outcome}  "
          f"(source tie {rep.witness['v_pi']}={rep.witness['v_rho']}, images "
          f"{rep.witness['v_pi_dagger']} vs {rep.witness['v_rho_dagger']})")

    base = diamond_base(args.depth)
    dest = diamond_specs(base)["F^ae"]
    for astyle, estyle in PLANTED:
        cand = candidate_translation(base, dest, astyle, estyle)
        plan, rep = build_descending_chain(cand, chain_length=args.chain)
        reports[f"chain[{astyle}+{estyle}]"] = {
            "plan": plan.to_json(), "report": rep.to_json()}
        ok &= rep.outcome == "contradiction_exhibited"
        print(f"descending chain   {astyle}+{estyle:<14} {rep.outcome}  "
              f"(witness pair {rep.witness['pi']} / {rep.witness['rho']})")

    cand = candidate_translation(dest, base, "mode", "inclusion")
    rep = cardinality_audit(cand, n=args.mixtures)
    reports["cardinality"] = rep.to_json()
    ok &= rep.outcome == "contradiction_exhibited"
    print(f"counting audit     mode+inclusion         {rep.outcome}  "
          f"({len(rep.details['mixtures'])} exact values, witness "
          f"{rep.witness['pi']} / {rep.witness['rho']})")

    if args.json:
        with open(args.json, "w") as fh:
            fh.write(canonical_json(reports))
        print(f"\nwrote {args.json}")

    print("\nall contradictions exhibited" if ok
          else "\nSOME AUDIT DID NOT CLOSE", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

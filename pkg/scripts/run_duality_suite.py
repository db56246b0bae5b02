#!/usr/bin/env python3
"""Run the full distributional verification suite and print a scoreboard.

Covers the kernel duality residuals, reversal invariance for the two
self-dual families plus the uniform negative control, the exit-law test,
and restriction consistency with its mismatched negative control.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from brokenlines.duality import (
    burke_exit_test,
    consistency_test,
    kernel_duality_residual,
    parse_triple,
    reversal_invariance_test,
)
from brokenlines.lattice import RectDomain


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--invariance-samples", type=int, default=100_000)
    parser.add_argument("--exit-samples", type=int, default=10_000)
    parser.add_argument("--outdir", default=None, help="also write report JSONs here")
    args = parser.parse_args()

    outdir = Path(args.outdir) if args.outdir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)

    def show(name: str, passed: bool, detail: str, payload=None) -> None:
        print(f"{'PASS' if passed else 'FAIL':4}  {name:<28} {detail}")
        if outdir and payload is not None:
            (outdir / f"{name}.json").write_text(json.dumps(payload, indent=2))

    worst = max(kernel_duality_residual(lam, 8) for lam in (0.1, 0.3, 0.5, 0.7, 0.9))
    show("kernel_duality", worst <= 1e-12, f"max residual {worst:.2e}")

    for token, expect in (
        ("exp:1,exp:2,exp:3", True),
        ("geom:0.4,geom:0.5,geom:0.2", True),
        ("unif:0:1,unif:0:1,unif:0:1", False),
    ):
        report = reversal_invariance_test(
            parse_triple(token), args.invariance_samples, seed=args.seed
        )
        ok = report.passed is expect
        show(f"invariance[{token}]", ok, f"passed={report.passed} expected={expect}",
             report.to_dict())

    domain = RectDomain(3, 3)
    for token in ("exp:1,exp:1,exp:2", "geom:0.5,geom:0.5,geom:0.25"):
        report = burke_exit_test(domain, parse_triple(token), args.exit_samples, seed=args.seed)
        show(f"exit_law[{token}]", report.passed, f"{len(report.checks)} checks",
             report.to_dict())

    matched = consistency_test(3, 3, 0.5, args.exit_samples, seed=args.seed, n_inner=2)
    show("consistency[3x3->2x3]", matched.passed, f"{len(matched.checks)} checks",
         matched.to_dict())
    control = consistency_test(
        3, 3, 0.5, args.exit_samples, seed=args.seed, n_inner=2, inner_lam=0.6
    )
    show("consistency[mismatch]", not control.passed,
         f"control rejected={not control.passed}", control.to_dict())


if __name__ == "__main__":
    main()

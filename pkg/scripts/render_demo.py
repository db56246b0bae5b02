#!/usr/bin/env python3
"""Sample a chain field and render its lines and brick diagram to SVG."""

from __future__ import annotations

import argparse
from pathlib import Path

from brokenlines.duality import evolve_chain
from brokenlines.lattice import RectDomain
from brokenlines.lines import decompose
from brokenlines.render import render_field_svg


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--lam", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="field.svg")
    args = parser.parse_args()

    field = evolve_chain(RectDomain(args.n, args.m), args.lam, args.seed)
    dec = decompose(field)
    Path(args.out).write_text(render_field_svg(field))
    print(f"{len(dec)} crossing lines, total weight {dec.total_weight()}; wrote {args.out}")


if __name__ == "__main__":
    main()

"""SVG figures: refinement levels, the peak sum with avoided squares, and porosity balls."""

from __future__ import annotations

import argparse
from fractions import Fraction
from pathlib import Path

import numpy as np

from monograph.acceptance import peak_model
from monograph.cli import write_atomic
from monograph.constructions.mzv import mzv_approximant
from monograph.geometry import Rect53, porosity_estimate, sample_graph, square_avoidance, squares_of_rect
from monograph.svg import render_svg


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    out = Path(args.out)

    series = []
    for n in range(4):
        f = mzv_approximant(n).fn
        series.append([(float(x), float(y)) for x, y in zip(f.breakpoints, f.values)])
    write_atomic(out / "levels.svg", render_svg(series, title="refinement levels 0-3"))

    m = peak_model()
    g = m.partial_sum()
    squares = []
    for cx in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        R = Rect53.centered(cx, Fraction(1, 8), Fraction(1, 3))
        k = square_avoidance(g, R)
        if k is not None:
            s = squares_of_rect(R)[k]
            squares.append((float(s.left), float(s.bottom), float(s.side)))
    pts = [(float(x), float(y)) for x, y in zip(g.breakpoints, g.values)]
    write_atomic(out / "peaks_avoided.svg", render_svg([pts], squares=squares, title="peak sum with avoided squares"))

    samples = sample_graph(g, 50_000)
    centers = samples[np.linspace(0, len(samples) - 1, 6).astype(int)]
    rep = porosity_estimate(samples, centers, [1 / 8])
    balls = [(b.center[0], b.center[1], b.radius) for b in rep.balls]
    write_atomic(out / "porosity.svg", render_svg([pts], balls=balls, title="worst empty ball at r = 1/8"))
    print(f"wrote {out}/levels.svg, peaks_avoided.svg, porosity.svg")


if __name__ == "__main__":
    main()

"""Command-line interface: ``monograph <command> ...``.

Exit status: 0 when the command ran and the checked property holds (or no
counterexample was found), 1 when it ran and the property failed (a
refutation was found, a check or certificate failed), 2 on usage or input
errors.  Rationals cross the boundary as "p/q" strings.  Every output file is
written to a temporary file and renamed into place.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import acceptance
from .constructions.mzv import MZV_LEVEL_CAP, MzvLevel, ResourceLimitError, mzv_approximant
from .constructions.peaks import MarginNotCertified, PeakSumModel, peak_build
from .constructions.series import SeriesEvaluator, nomp_witness
from .differentiation import SIDES, dini_estimate, knot_report, mzv_point_class, pl_evaluator
from .exact_core import DomainError, PLFunction, rat_to_str, str_to_rat
from .geometry import (
    Rect53,
    box_dimension,
    graph_length,
    porosity_estimate,
    rect_grid,
    sample_graph,
    square_avoidance,
    squares_of_rect,
)
from .monotonicity import (
    Inconclusive,
    MpointRefutation,
    PcCertificate,
    WitnessTriple,
    certified_quotient,
    check_pc,
    monotonicity_bracket,
    mpoint_refute,
    refute_monotone,
)
from .svg import render_svg

THREADS_ENV = "MONOGRAPH_THREADS"


class UsageError(Exception):
    """Bad flags or unreadable input (exit status 2)."""


@dataclass
class RunConfig:
    """One CLI invocation.  Unset fields fall back to the per-command defaults."""

    command: str
    kind: Optional[str] = None  # construct: mzv | peaks | nomp | takagi
    level: int = 1  # refinement level n
    N: int = 6  # number of peaks beyond the base peak
    K: int = 40  # series truncation
    c: str = "1"  # monotonicity constant
    eps: str = "1/1048576"  # neighbourhood radius for mpoint
    budget: int = 200  # refinement steps for refute
    mesh: int = 27  # dyadic mesh exponent for mpoint
    grid: int = 40  # margin search grid
    seed: int = acceptance.DEFAULT_SEED
    inp: Optional[str] = None
    out: Optional[str] = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        known = {f.name for f in fields(cls)} - {"options"}
        data = vars(ns).copy()
        base = {k: data.pop(k) for k in list(data) if k in known and data[k] is not None}
        data.pop("func", None)
        data.pop("config", None)
        return cls(**base, options=data)


# --- I/O helpers -----------------------------------------------------------------


def write_atomic(path: Path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(text: str, out: Optional[str]) -> None:
    if out:
        write_atomic(Path(out), text)
    else:
        sys.stdout.write(text)


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def read_json(path: Optional[str]) -> dict:
    if not path:
        raise UsageError("--in is required")
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_function(path: Optional[str]) -> PLFunction:
    """Accept a PLFunction, an MzvLevel or a PeakSumModel document."""
    data = read_json(path)
    try:
        kind = data.get("kind")
        if kind == "mzv":
            return MzvLevel.from_dict(data).fn
        if kind == "peaks":
            return PeakSumModel.from_dict(data).partial_sum()
        return PLFunction.from_dict(data)
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise UsageError(f"{path} is not a function document: {exc}") from exc


def parse_rat(text: str) -> Fraction:
    try:
        return str_to_rat(text) if "/" in str(text) else Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational: {text!r}") from exc


def parse_list(text: Optional[str], conv=parse_rat) -> list:
    if not text:
        return []
    return [conv(t) for t in text.split(",") if t.strip()]


def series_evaluator(kind: str, K: int) -> SeriesEvaluator:
    if kind not in ("nomp", "takagi"):
        raise UsageError(f"unknown series {kind!r}")
    return SeriesEvaluator(kind, K)


# --- commands --------------------------------------------------------------------


def cmd_construct(cfg: RunConfig) -> int:
    if cfg.kind == "mzv":
        if not 0 <= cfg.level <= MZV_LEVEL_CAP:
            raise UsageError(f"--level must lie in [0, {MZV_LEVEL_CAP}]")
        doc = mzv_approximant(cfg.level).to_dict()
    elif cfg.kind == "peaks":
        doc = peak_build(cfg.N, cfg.grid).to_dict()
    else:
        ev = series_evaluator(cfg.kind, cfg.K)
        m = int(cfg.options.get("points_log2") or 6)
        rows = []
        for k in range(2**m + 1):
            v, e = ev(Fraction(k, 2**m))
            rows.append([rat_to_str(Fraction(k, 2**m)), rat_to_str(v), rat_to_str(e)])
        doc = {"kind": "series", "series": cfg.kind, "K": cfg.K, "tail_bound": rat_to_str(ev.tail_bound), "samples": rows}
    emit(dump_json(doc), cfg.out)
    return 0


def cmd_check_pc(cfg: RunConfig) -> int:
    f = load_function(cfg.inp)
    cert = check_pc(f, parse_rat(cfg.c))
    if cfg.out:
        write_atomic(Path(cfg.out), dump_json(cert.to_dict()))
    print(cert.outcome)
    return 0 if cert.passed else 1


def cmd_refute(cfg: RunConfig) -> int:
    f = load_function(cfg.inp)
    c = parse_rat(cfg.c)
    w = refute_monotone(f, c, cfg.budget, symmetric=bool(cfg.options.get("symmetric")))
    doc = {"kind": "witness", "c": rat_to_str(c), "symmetric": bool(cfg.options.get("symmetric")), "witness": None if w is None else w.to_dict()}
    emit(dump_json(doc), cfg.out)
    return 0 if w is None else 1


def cmd_bracket(cfg: RunConfig) -> int:
    f = load_function(cfg.inp)
    emit(dump_json(monotonicity_bracket(f, cfg.budget).to_dict()), cfg.out)
    return 0


def cmd_mpoint(cfg: RunConfig) -> int:
    ev = series_evaluator(cfg.options.get("series") or "nomp", cfg.K)
    ys = parse_list(cfg.options.get("y"))
    if not ys:
        raise UsageError("--y is required")
    c, eps = parse_rat(cfg.c), parse_rat(cfg.eps)
    depth = int(cfg.options.get("witness_depth") or 5)
    rows, refuted = [], 0
    for y in ys:
        hints = [nomp_witness(y, depth)[:2]] if ev.kind == "nomp" else []
        try:
            ref = mpoint_refute(ev, y, c, eps, cfg.mesh, hints=hints)
            rows.append({"y": rat_to_str(y), "refutation": None if ref is None else ref.to_dict()})
        except Inconclusive as exc:
            ref = None
            rows.append({"y": rat_to_str(y), "refutation": None, "inconclusive": str(exc)})
        refuted += ref is not None
    doc = {"kind": "mpoint", "series": ev.kind, "K": ev.K, "c": rat_to_str(c), "eps": rat_to_str(eps), "points": rows}
    emit(dump_json(doc), cfg.out)
    return 1 if refuted else 0


def _dini_target(cfg: RunConfig):
    series = cfg.options.get("series")
    if series:
        return series_evaluator(series, cfg.K)
    return pl_evaluator(load_function(cfg.inp))


def cmd_dini(cfg: RunConfig) -> int:
    f = _dini_target(cfg)
    xs = parse_list(cfg.options.get("x"))
    if not xs:
        raise UsageError("--x is required")
    levels = int(cfg.options.get("levels") or 40)
    h_min = parse_rat(cfg.options.get("h_min") or f"1/{2**levels}")
    rows = []
    for x in xs:
        row = dini_estimate(f, x, h_min, levels).to_row()
        rows.append([row["x"]] + [row[s] for s in SIDES] + [row[f"{s}_certified"] for s in SIDES])
    header = ["x", *(f"{s}_estimate" for s in SIDES), *(f"{s}_certified" for s in SIDES)]
    emit(to_csv(header, rows), cfg.out)
    return 0


def cmd_knot(cfg: RunConfig) -> int:
    f = _dini_target(cfg)
    x = parse_rat(cfg.options.get("x") or "")
    levels = int(cfg.options.get("levels") or 60)
    rep = knot_report(f, x, parse_rat(cfg.options.get("threshold") or "10"), levels)
    doc = rep.to_dict()
    if cfg.options.get("series"):
        doc.update({"series": cfg.options["series"], "K": cfg.K})
    emit(dump_json({"kind": "knot", **doc}), cfg.out)
    return 0 if rep.found else 1


def cmd_classify(cfg: RunConfig) -> int:
    xs = parse_list(cfg.options.get("x"))
    if not xs:
        raise UsageError("--x is required")
    depth = int(cfg.options.get("depth") or 8)
    emit(dump_json([mzv_point_class(x, depth).to_dict() for x in xs]), cfg.out)
    return 0


def _rectangles(cfg: RunConfig, g: PLFunction) -> list[Rect53]:
    text = cfg.options.get("rect")
    if text:
        cx, cy, base = (parse_rat(t) for t in text.split(","))
        return [Rect53.centered(cx, cy, base)]
    bases = parse_list(cfg.options.get("bases"))
    if not bases:
        raise UsageError("give --rect cx,cy,base or --bases b1,b2,...")
    n = int(cfg.options.get("grid_n") or 20)
    return rect_grid(g, n, n, bases)


def cmd_avoid(cfg: RunConfig) -> int:
    g = load_function(cfg.inp)
    rows, missing = [], 0
    for R in _rectangles(cfg, g):
        k = square_avoidance(g, R)
        missing += k is None
        rows.append({"left": rat_to_str(R.left), "bottom": rat_to_str(R.bottom), "base": rat_to_str(R.base), "square": k})
    emit(dump_json({"kind": "avoid", "rectangles": rows, "without_avoided_square": missing}), cfg.out)
    return 1 if missing else 0


def _samples(cfg: RunConfig) -> np.ndarray:
    return sample_graph(load_function(cfg.inp), int(cfg.options.get("samples") or 100_000))


def cmd_porosity(cfg: RunConfig) -> int:
    samples = _samples(cfg)
    rng = np.random.default_rng(cfg.seed)
    k = min(int(cfg.options.get("centers") or 200), len(samples))
    centers = samples[np.sort(rng.choice(len(samples), size=k, replace=False))]
    radii = parse_list(cfg.options.get("radii") or "1/4,1/8,1/16,1/32", lambda t: float(parse_rat(t)))
    rep = porosity_estimate(samples, centers, radii)
    rows = [[f"{x:.9g}", f"{y:.9g}", f"{r:.9g}", f"{q:.9g}"] for x, y, r, q in rep.rows()]
    emit(to_csv(["center_x", "center_y", "r", "q_estimate"], rows), cfg.out)
    print(f"p_estimate={rep.p:.6f} resolution={rep.resolution:.3g}", file=sys.stderr)
    return 0


def cmd_boxdim(cfg: RunConfig) -> int:
    samples = _samples(cfg)
    lo = float(parse_rat(cfg.options.get("side_min") or "1/1024"))
    hi = float(parse_rat(cfg.options.get("side_max") or "1/8"))
    try:
        slope, counts = box_dimension(samples, lo, hi)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    emit(to_csv(["side", "count"], [[f"{s:.9g}", n] for s, n in counts]), cfg.out)
    print(f"slope_estimate={slope:.6f}", file=sys.stderr)
    return 0


def cmd_length(cfg: RunConfig) -> int:
    lo, hi = graph_length(load_function(cfg.inp), int(cfg.options.get("bits") or 40))
    emit(dump_json({"kind": "length", "lower": rat_to_str(lo), "upper": rat_to_str(hi)}), cfg.out)
    return 0


def cmd_plot(cfg: RunConfig) -> int:
    g = load_function(cfg.inp)
    pts = sample_graph(g, int(cfg.options.get("samples") or 2000))
    squares = []
    if cfg.options.get("rect"):
        R = _rectangles(cfg, g)[0]
        k = square_avoidance(g, R)
        if k is not None:
            sq = squares_of_rect(R)[k]
            squares.append((float(sq.left), float(sq.bottom), float(sq.side)))
    svg = render_svg([[(float(x), float(y)) for x, y in pts]], squares=squares, title=cfg.options.get("title") or "")
    emit(svg, cfg.out)
    return 0


# --- reproduce / verify -------------------------------------------------------------


def _run_one(args: tuple[int, int]) -> dict:
    cid, seed = args
    return acceptance.run_check(cid, seed)


def reproduce_acceptance(out: Path, seed: int, only: Sequence[int] = ()) -> list[dict]:
    ids = list(only) or list(acceptance.CHECKS)
    threads = max(1, int(os.environ.get(THREADS_ENV, "1") or 1))
    jobs = [(cid, seed) for cid in ids]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_one, jobs))  # map keeps submission order
    else:
        records = [_run_one(j) for j in jobs]
    for rec in records:
        write_atomic(out / f"criterion_{rec['id']:02d}.json", dump_json(rec))
    summary = [{"id": r["id"], "name": r["name"], "passed": r["passed"]} for r in records]
    write_atomic(out / "summary.json", dump_json({"seed": seed, "criteria": summary}))
    write_atomic(out / "summary.csv", to_csv(["id", "name", "passed"], [[r["id"], r["name"], r["passed"]] for r in summary]))
    _figures(out, seed)
    return records


def _figures(out: Path, seed: int) -> None:
    """Tables and plots that accompany the criterion records."""
    f3 = mzv_approximant(3).fn
    R = Rect53.centered(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    k = square_avoidance(f3, R)
    squares = [] if k is None else [(float(s.left), float(s.bottom), float(s.side)) for s in [squares_of_rect(R)[k]]]
    pts = [(float(x), float(y)) for x, y in zip(f3.breakpoints, f3.values)]
    write_atomic(out / "f3_avoided_square.svg", render_svg([pts], squares=squares, title="f_3 with an avoided square"))
    f8 = mzv_approximant(8).fn
    _, counts = box_dimension(sample_graph(f8, 300_000), 2.0**-10, 2.0**-3)
    write_atomic(out / "boxcounts_f8.csv", to_csv(["side", "count"], [[f"{s:.9g}", n] for s, n in counts]))
    g = acceptance.peak_model().partial_sum()
    pts = [(float(x), float(y)) for x, y in zip(g.breakpoints, g.values)]
    write_atomic(out / "peak_sum.svg", render_svg([pts], title="peak sum g_6"))


def cmd_reproduce(cfg: RunConfig) -> int:
    if cfg.options.get("suite") != "acceptance":
        raise UsageError("only --suite acceptance is available")
    if not cfg.out:
        raise UsageError("--out DIR is required")
    only = parse_list(cfg.options.get("only"), int)
    records = reproduce_acceptance(Path(cfg.out), cfg.seed, only)
    for r in records:
        print(f"criterion {r['id']:2d} {'PASS' if r['passed'] else 'FAIL'}  {r['name']}")
    return 0 if all(r["passed"] for r in records) else 1


def verify_document(doc: dict, f: Optional[PLFunction]) -> bool:
    """Re-check a certificate from its stored numbers (no search is repeated)."""
    kind = doc.get("kind")
    if kind == "pc":
        if f is None:
            raise UsageError("a P_c certificate needs --in FUNCTION")
        return PcCertificate.from_dict(doc).verify(f)
    if kind == "witness":
        if doc.get("witness") is None:
            return True
        if f is None:
            raise UsageError("a witness needs --in FUNCTION")
        c = str_to_rat(doc["c"])
        w = WitnessTriple.from_dict(doc["witness"])
        triples = [w] + ([w.companion] if w.companion is not None else [])
        ok = all(t.recompute(f) == t.ratio_sq and t.refutes(c) for t in triples)
        return ok and (bool(doc.get("symmetric")) or len(triples) == 2)
    if kind == "mpoint":
        ev = series_evaluator(doc["series"], int(doc["K"]))
        c = str_to_rat(doc["c"])
        for row in doc["points"]:
            ref = row.get("refutation")
            if ref is None:
                continue
            r = MpointRefutation(*(str_to_rat(ref[k]) for k in ("y", "x", "z", "quotient_lb")))
            q = certified_quotient(ev(r.x), ev(r.y), ev(r.z), r.x, r.z)
            if not (q == r.quotient_lb and q > c and r.x < r.y < r.z):
                return False
        return True
    if kind == "knot":
        if not doc.get("found"):
            return True
        ev = series_evaluator(doc["series"], int(doc["K"])) if doc.get("series") else (pl_evaluator(f) if f else None)
        if ev is None:
            raise UsageError("knot evidence for a PL function needs --in FUNCTION")
        x, T = str_to_rat(doc["x"]), str_to_rat(doc["threshold"])
        for side, q in doc["extremes"].items():
            h = str_to_rat(q["h"])
            (fx, ex), (fy, ey) = ev(x), ev(x + h if side.endswith("right") else x - h)
            val = (fy - fx) / h if side.endswith("right") else (fx - fy) / h
            err = (ex + ey) / h
            if side.startswith("upper") and not val - err > T:
                return False
            if side.startswith("lower") and not val + err < -T:
                return False
        return True
    if kind == "avoid":
        if f is None:
            raise UsageError("an avoidance report needs --in FUNCTION")
        from .geometry import graph_meets_open_square

        for row in doc["rectangles"]:
            if row["square"] is None:
                continue
            R = Rect53(str_to_rat(row["left"]), str_to_rat(row["bottom"]), str_to_rat(row["base"]))
            if graph_meets_open_square(f, squares_of_rect(R)[row["square"]]):
                return False
        return True
    raise UsageError(f"cannot verify documents of kind {kind!r}")


def cmd_verify(cfg: RunConfig) -> int:
    cert = cfg.options.get("cert")
    doc = read_json(cert)
    f = load_function(cfg.inp) if cfg.inp else None
    ok = verify_document(doc, f)
    print("verified" if ok else "NOT verified")
    return 0 if ok else 1


# --- argument parsing ----------------------------------------------------------------

COMMANDS = {
    "construct": cmd_construct,
    "check-pc": cmd_check_pc,
    "refute": cmd_refute,
    "bracket": cmd_bracket,
    "mpoint": cmd_mpoint,
    "dini": cmd_dini,
    "knot": cmd_knot,
    "classify": cmd_classify,
    "avoid": cmd_avoid,
    "porosity": cmd_porosity,
    "boxdim": cmd_boxdim,
    "length": cmd_length,
    "plot": cmd_plot,
    "reproduce": cmd_reproduce,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 as well, but we keep control
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="monograph", description="Exact constructions and checks for pathological continuous functions.")
    p.add_argument("--config", help="JSON file whose keys provide defaults for the flags")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help: str, inp: bool = False, out: bool = True) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        if inp:
            sp.add_argument("--in", dest="inp", help="function JSON (PL function, refinement level or peak model)")
        if out:
            sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, help=f"random seed (default {acceptance.DEFAULT_SEED})")
        return sp

    sp = add("construct", "build a construction and write it as JSON")
    sp.add_argument("kind", choices=["mzv", "peaks", "nomp", "takagi"])
    sp.add_argument("--level", type=int, help="refinement level n (mzv)")
    sp.add_argument("--N", type=int, help="number of peaks (peaks)")
    sp.add_argument("--grid", type=int, help="margin search grid (peaks)")
    sp.add_argument("--K", type=int, help="series truncation (nomp, takagi)")
    sp.add_argument("--points-log2", type=int, help="sample the series at k/2^m, m = this (default 6)")

    sp = add("check-pc", "decide condition P_c exactly", inp=True)
    sp.add_argument("--c", help="constant (default 1)")

    sp = add("refute", "search for a triple refuting c-monotonicity of the graph", inp=True)
    sp.add_argument("--c", help="constant (default 1)")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--symmetric", action="store_true", help="refute symmetric monotonicity (either side suffices)")

    sp = add("bracket", "bracket the monotonicity constant of the graph", inp=True)
    sp.add_argument("--budget", type=int)

    sp = add("mpoint", "certify that points are not points of local monotonicity")
    sp.add_argument("--series", choices=["nomp", "takagi"], default="nomp")
    sp.add_argument("--y", help="comma-separated rationals")
    sp.add_argument("--c", help="constant (default 1)")
    sp.add_argument("--eps", help="neighbourhood radius")
    sp.add_argument("--mesh", type=int, help="search grid y + k 2^-mesh")
    sp.add_argument("--K", type=int)
    sp.add_argument("--witness-depth", type=int, help="depth of the constructed witness pair (default 5)")

    for name, help in (("dini", "Dini quotient extremes as CSV rows"), ("knot", "certified knot-point evidence")):
        sp = add(name, help, inp=True)
        sp.add_argument("--series", choices=["nomp", "takagi"])
        sp.add_argument("--K", type=int)
        sp.add_argument("--x", help="comma-separated rationals" if name == "dini" else "a rational")
        sp.add_argument("--levels", type=int, help="probe h = h_min 2^i, i < levels")
        if name == "dini":
            sp.add_argument("--h-min")
        else:
            sp.add_argument("--threshold")

    sp = add("classify", "classify points against the flat blocks of the refinement")
    sp.add_argument("--x", help="comma-separated rationals")
    sp.add_argument("--depth", type=int)

    sp = add("avoid", "find avoided squares of 5:3 rectangles", inp=True)
    sp.add_argument("--rect", help="cx,cy,base")
    sp.add_argument("--bases", help="comma-separated bases for a grid of rectangles")
    sp.add_argument("--grid-n", type=int, help="grid size per axis (default 20)")

    sp = add("porosity", "porosity estimate as CSV rows (center, r, q)", inp=True)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--centers", type=int)
    sp.add_argument("--radii", help="comma-separated radii")

    sp = add("boxdim", "box counts as CSV rows (side, count)", inp=True)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--side-min")
    sp.add_argument("--side-max")

    sp = add("length", "rational bounds on the graph length", inp=True)
    sp.add_argument("--bits", type=int)

    sp = add("plot", "SVG plot of a graph, optionally with an avoided square", inp=True)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--rect", help="cx,cy,base")
    sp.add_argument("--title")

    sp = add("reproduce", "regenerate the acceptance tables")
    sp.add_argument("--suite", required=True)
    sp.add_argument("--only", help="comma-separated criterion ids")

    sp = add("verify", "re-check a certificate from the artifact alone", inp=True, out=False)
    sp.add_argument("--cert", required=True)
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        try:
            defaults = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        for k, v in defaults.items():
            k = k.replace("-", "_")
            if getattr(ns, k, None) is None:
                setattr(ns, k, v)
    return RunConfig.from_namespace(ns)


def dispatch(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
        return dispatch(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceLimitError, MarginNotCertified, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

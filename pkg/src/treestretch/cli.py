"""Command-line front end.

Exit codes: 0 success (or admissible), 1 parse error, 2 failed precondition,
3 not admissible, 4 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import bruhat_tits as bt
from . import io
from .admissibility import admissibility_profile, admissible, kobayashi_sufficient
from .errors import ParseError, TreeStretchError
from .graph import candidates, dirichlet_delta, displacement, translation_length, validate
from .padic import check_prime, format_fraction, to_fraction
from .stretch import PLMap, TargetPoint, lipschitz_of_pl_map, os_distance, stretch_factor, stretch_oracle
from .words import format_word, parse_word


# -- literal parsing -------------------------------------------------------------


def parse_vertex(text: str, p: int) -> bt.BTVertex:
    """``(n; u)``, ``(n; u mod p^n)`` or ``n,u``; ``x0`` is the base vertex."""
    if text.strip() == "x0":
        return bt.base_vertex(p)
    m = re.fullmatch(r"\s*\(?\s*(-?\d+)\s*[;,]\s*([^\s)]+)(?:\s+mod\s+\S+)?\s*\)?\s*", text)
    if not m:
        raise ParseError(f"not a vertex literal: {text!r}")
    level = int(m.group(1))
    if level < 0:
        raise ParseError(f"vertex level must be >= 0: {text!r}")
    return bt.BTVertex(level, to_fraction(m.group(2)), p)


def parse_boundary(text: str, p: int) -> bt.BoundaryPoint:
    m = re.fullmatch(r"\s*\[\s*([^:\s]+)\s*:\s*([^\]\s]+)\s*\]\s*", text)
    if not m:
        raise ParseError(f"not a boundary point literal: {text!r}")
    try:
        return bt.BoundaryPoint(to_fraction(m.group(1)), to_fraction(m.group(2)), p)
    except ValueError as exc:
        if isinstance(exc, TreeStretchError):
            raise
        raise ParseError(str(exc)) from exc


def parse_edge_path(spec) -> tuple:
    """A list like ``["e1", "-e2"]`` / ``[["e1", 1], ["e2", -1]]`` or a string ``"e1 -e2"``."""
    if isinstance(spec, str):
        spec = spec.split()
    out = []
    for item in spec:
        if isinstance(item, str):
            if item.startswith("-"):
                out.append((item[1:], -1))
            elif item.endswith("^-1"):
                out.append((item[:-3], -1))
            else:
                out.append((item, 1))
        else:
            out.append((str(item[0]), int(item[1])))
    return tuple(out)


def load_pl_map(path: str) -> PLMap:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    points = {}
    for v, spec in data.get("vertices", {}).items():
        if isinstance(spec, str):
            points[v] = TargetPoint(vertex=spec)
        elif "vertex" in spec:
            points[v] = TargetPoint(vertex=str(spec["vertex"]))
        else:
            points[v] = TargetPoint(edge=str(spec["edge"]), offset=to_fraction(spec.get("offset", 0)))
    edges = {e: parse_edge_path(p) for e, p in data.get("edges", {}).items()}
    tether = parse_edge_path(data["tether"]) if "tether" in data else None
    return PLMap(points, edges, tether)


# -- output ----------------------------------------------------------------------


class Out:
    def __init__(self, args):
        self.json = args.json
        self.float = args.float

    def q(self, x):
        """Exact rational, with a labelled decimal when --float is on."""
        if x == float("inf"):
            return "inf"
        x = Fraction(x)
        s = format_fraction(x)
        if self.float and not self.json:
            return f"{s} (~{float(x):.6g})"
        return s

    def emit(self, payload: dict, text: str):
        if self.json:
            if self.float:
                payload = dict(payload)
                payload["float"] = {
                    k: float(to_fraction(v)) for k, v in payload.items() if isinstance(v, str) and _is_rational(v)
                }
            print(json.dumps(payload, indent=2))
        else:
            print(text)


def _is_rational(s: str) -> bool:
    return re.fullmatch(r"-?\d+(/\d+)?", s) is not None


# -- commands --------------------------------------------------------------------


def _matrix(args):
    return bt.MatSL2.parse(args.matrix, check_prime(args.p))


def cmd_mu(args, out):
    g = _matrix(args)
    v = bt.mu(g)
    out.emit({"mu": v}, str(v))


def cmd_lambda(args, out):
    g = _matrix(args)
    v = bt.lam(g)
    out.emit({"lambda": v, "hyperbolic": v > 0}, str(v))


def cmd_cartan(args, out):
    t = bt.cartan(_matrix(args))
    out.emit({"k1": str(t.k1), "z": str(t.z), "k2": str(t.k2)}, f"k1 = {t.k1}\nz  = {t.z}\nk2 = {t.k2}")


def cmd_act(args, out):
    g = _matrix(args)
    if args.point.strip().startswith("["):
        r = bt.act_boundary(g, parse_boundary(args.point, g.prime))
    else:
        r = bt.act_vertex(g, parse_vertex(args.point, g.prime))
    out.emit({"image": str(r)}, str(r))


def cmd_vdist(args, out):
    p = check_prime(args.p)
    d = bt.vertex_dist(parse_vertex(args.v, p), parse_vertex(args.w, p))
    out.emit({"distance": d}, str(d))


def cmd_bdist(args, out):
    p = check_prime(args.p)
    r = bt.boundary_dist(parse_boundary(args.xi, p), parse_boundary(args.eta, p))
    gp = "inf" if r.r == float("inf") else int(r.r)
    out.emit({"gromov_product": gp, "distance": format_fraction(r.value)}, f"r = {gp}, distance = {out.q(r.value)}")


def cmd_zeta(args, out):
    z = bt.zeta_minus(_matrix(args))
    out.emit({"zeta_minus": str(z)}, str(z))


def cmd_ends(args, out):
    e = bt.fixed_ends(_matrix(args), args.precision)
    out.emit({"plus": str(e.plus), "minus": str(e.minus), "precision": args.precision}, f"xi+ = {e.plus}\nxi- = {e.minus}")


def _graph_and_word(args):
    g = io.load_graph(args.graph)
    validate(g)
    return g, parse_word(args.word, g.labels)


def cmd_tl(args, out):
    g, w = _graph_and_word(args)
    v = translation_length(g, w)
    out.emit({"word": format_word(w, g.labels), "translation_length": format_fraction(v)}, out.q(v))


def cmd_disp(args, out):
    g, w = _graph_and_word(args)
    v = displacement(g, w)
    out.emit({"word": format_word(w, g.labels), "displacement": format_fraction(v)}, out.q(v))


def cmd_candidates(args, out):
    g = io.load_graph(args.graph)
    cands = candidates(g)
    rows = [{"word": format_word(c.word, g.labels), "length": format_fraction(c.length)} for c in cands]
    text = "\n".join(f"{r['word']}\t{out.q(c.length)}" for r, c in zip(rows, cands))
    out.emit({"count": len(rows), "candidates": rows}, text)


def cmd_delta(args, out):
    g = io.load_graph(args.graph)
    d = dirichlet_delta(g)
    F = sorted(format_word(w, g.labels) for w in d.F)
    out.emit(
        {"delta": format_fraction(d.delta), "F": F, "radius": format_fraction(d.radius)},
        f"delta = {out.q(d.delta)}\nF = {{{', '.join(F)}}}",
    )


def _src_rep(args):
    g = io.load_graph(args.graph)
    validate(g)
    return g, io.load_representation(args.rep, g.labels)


def cmd_stretch(args, out):
    g, rep = _src_rep(args)
    report = stretch_factor(g, rep)
    payload = io.stretch_report_to_dict(report, g.labels)
    text = "\n".join(
        [f"C = {out.q(report.value)}", f"witness = {format_word(report.witness, g.labels)}", f"candidates = {report.candidate_count}"]
    )
    out.emit(payload, text)


def cmd_stretch_oracle(args, out):
    g, rep = _src_rep(args)
    value, witness = stretch_oracle(g, rep, args.max_len, jobs=args.jobs)
    payload = {"value": format_fraction(value), "witness": format_word(witness, g.labels), "max_len": args.max_len}
    out.emit(payload, f"C_{args.max_len} = {out.q(value)}\nwitness = {payload['witness']}")


def cmd_lip(args, out):
    g, rep = _src_rep(args)
    v = lipschitz_of_pl_map(g, rep, load_pl_map(args.map))
    out.emit({"lipschitz": format_fraction(v)}, out.q(v))


def cmd_os_dist(args, out):
    y1, y2 = io.load_graph(args.y1), io.load_graph(args.y2)
    d = os_distance(y1, y2)
    payload = {
        "ratio": format_fraction(d.ratio),
        "witness": format_word(d.witness, y1.labels),
        "normalized": list(d.normalized),
    }
    text = f"ratio = {out.q(d.ratio)}\nwitness = {payload['witness']}"
    if any(d.normalized):
        text += "\n(inputs rescaled to volume 1)"
    out.emit(payload, text)


def _verdict(report, g, out):
    payload = io.admissibility_report_to_dict(report, g.labels)
    label = "bound" if report.method == "kobayashi" else "C_rho"
    lines = [payload["verdict"], f"{label} = {out.q(report.c_rho)}", f"witness = {payload['witness']}"]
    if report.delta is not None:
        lines.append(f"delta = {out.q(report.delta)}")
    out.emit(payload, "\n".join(lines))
    return report.exit_code


def cmd_admissible(args, out):
    g, rep = _src_rep(args)
    return _verdict(admissible(g, rep), g, out)


def cmd_kobayashi(args, out):
    g, rep = _src_rep(args)
    return _verdict(kobayashi_sufficient(g, rep), g, out)


def cmd_profile(args, out):
    g, rep = _src_rep(args)
    schottky = probe = None
    if args.schottky or args.probe:
        if not (args.schottky and args.probe):
            raise ParseError("--schottky and --probe go together")
        schottky = io.load_representation(args.schottky, g.labels)
        probe = bt.MatSL2.parse(args.probe, schottky.target.prime)
    rows = admissibility_profile(g, rep, args.max_len, schottky, probe)
    payload = {
        "rows": [
            {
                "length": r.length,
                "gap": format_fraction(r.gap),
                "witness": format_word(r.witness, g.labels),
                "source_min": format_fraction(r.source_min),
                **({"probe": r.probe} if r.probe is not None else {}),
            }
            for r in rows
        ]
    }
    text = "\n".join(
        f"{r.length}\tgap {out.q(r.gap)}\tsource_min {out.q(r.source_min)}" + (f"\tprobe {r.probe}" if r.probe is not None else "")
        for r in rows
    )
    out.emit(payload, text)


def selftest(max_len: int = 6, instances: int = 10) -> list:
    """Figure-5 golden case plus a small oracle-agreement run; returns (name, ok) pairs."""
    from .instances import figure_five, make_rng, random_graph, random_graph_rep

    results = []
    y1, y2 = figure_five(Fraction(1, 4)), figure_five(Fraction(1, 3))
    d12, d21 = os_distance(y1, y2), os_distance(y2, y1)
    results.append(("figure-five forward 4/3", d12.ratio == Fraction(4, 3) and d12.witness == (1,)))
    results.append(("figure-five backward 9/8", d21.ratio == Fraction(9, 8) and d21.witness == (1, 2)))
    rng = make_rng()
    agree = True
    for _ in range(instances):
        src = random_graph(rng, 2)
        rep = random_graph_rep(src, rng)
        agree &= stretch_factor(src, rep).value == stretch_oracle(src, rep, max_len)[0]
    results.append((f"candidate/oracle agreement ({instances} rank-2 instances, L={max_len})", agree))
    return results


def cmd_selftest(args, out):
    start = time.time()
    results = selftest()
    ok = all(r for _, r in results)
    text = "\n".join(f"{'PASS' if r else 'FAIL'}  {name}" for name, r in results)
    text += f"\n{'all passed' if ok else 'FAILURES'} in {time.time() - start:.2f}s"
    out.emit({"results": [{"name": n, "ok": r} for n, r in results], "ok": ok}, text)
    return 0 if ok else 2


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--float", action="store_true", help="add labelled decimal approximations")
    common.add_argument("--p", type=int, default=2, help="prime (default 2)")
    common.add_argument("--precision", type=int, default=10, help="Hensel precision in digits")
    common.add_argument("--max-len", type=int, default=8, help="max word length for scans")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for oracle scans")

    parser = argparse.ArgumentParser(prog="treestretch", description="Stretch factors and admissibility for actions on trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, *positional, help=None):
        sp = sub.add_parser(name, parents=[common], help=help)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(func=func)
        return sp

    add("mu", cmd_mu, "matrix", help="Cartan projection mu(g) = d(x0, g x0)")
    add("lambda", cmd_lambda, "matrix", help="translation length on the tree")
    add("cartan", cmd_cartan, "matrix", help="Cartan decomposition k1 z k2")
    add("act", cmd_act, "matrix", "point", help="act on a vertex '(n; u)' or boundary point '[x:y]'")
    add("vdist", cmd_vdist, "v", "w", help="distance between vertices")
    add("bdist", cmd_bdist, "xi", "eta", help="visual distance between boundary points")
    add("zeta", cmd_zeta, "matrix", help="the boundary point zeta^-(g)")
    add("ends", cmd_ends, "matrix", help="attracting and repelling ends of a hyperbolic matrix")
    add("tl", cmd_tl, "graph", "word", help="translation length of a word in a marked graph")
    add("disp", cmd_disp, "graph", "word", help="displacement of the base point")
    add("candidates", cmd_candidates, "graph", help="candidate loops")
    add("delta", cmd_delta, "graph", help="Dirichlet margin delta and the set F")
    add("stretch", cmd_stretch, "graph", "rep", help="minimal Lipschitz constant via candidates")
    add("stretch-oracle", cmd_stretch_oracle, "graph", "rep", help="brute-force max over a word ball")
    add("lip", cmd_lip, "graph", "rep", "map", help="Lipschitz constant of a PL map")
    add("os-dist", cmd_os_dist, "y1", "y2", help="exp of the asymmetric Lipschitz distance")
    add("admissible", cmd_admissible, "graph", "rep", help="exact test C < 1")
    add("kobayashi", cmd_kobayashi, "graph", "rep", help="sufficient test via delta")
    prof = add("profile", cmd_profile, "graph", "rep", help="per-shell displacement gaps")
    prof.add_argument("--schottky", help="matrix representation file for matrix mode")
    prof.add_argument("--probe", help="probe matrix literal for matrix mode")
    add("selftest", cmd_selftest, help="golden case and a small oracle run")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    out = Out(args)
    try:
        code = args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except TreeStretchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc, (OSError, KeyError)) else 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())

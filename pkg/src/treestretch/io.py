"""JSON files for graphs, representations and reports.

Rationals travel as ``"num/den"`` strings so they survive a round trip
exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence, Union

from . import bruhat_tits as bt
from .errors import ParseError
from .graph import MarkedMetricGraph
from .padic import check_prime, format_fraction, to_fraction
from .stretch import GraphTarget, MatrixTarget, Representation, StretchReport, StretchRow
from .words import DEFAULT_LABELS, format_word, parse_word

PathLike = Union[str, Path]


def _read(source, base: Optional[Path] = None):
    if isinstance(source, dict):
        return source, base
    path = Path(source)
    if base is not None and not path.is_absolute():
        path = base / path
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh), path.parent
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _need(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{where}: missing field {key!r}")
    return data[key]


# -- graphs ----------------------------------------------------------------------


def graph_from_dict(data: dict) -> MarkedMetricGraph:
    try:
        edges = [
            (_need(e, "id", "edge"), _need(e, "from", "edge"), _need(e, "to", "edge"), to_fraction(_need(e, "length", "edge")))
            for e in _need(data, "edges", "graph")
        ]
        gens = [
            (_need(g, "label", "generator"), _need(g, "edge", "generator"), int(g.get("orientation", 1)))
            for g in _need(data, "generators", "graph")
        ]
        return MarkedMetricGraph(
            _need(data, "vertices", "graph"),
            edges,
            _need(data, "basepoint", "graph"),
            _need(data, "spanning_tree", "graph"),
            gens,
        )
    except (TypeError, AttributeError) as exc:
        raise ParseError(f"malformed graph: {exc}") from exc


def graph_to_dict(g: MarkedMetricGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "from": e.tail, "to": e.head, "length": format_fraction(e.length)} for e in g.edges],
        "basepoint": g.basepoint,
        "spanning_tree": sorted(g.spanning_tree),
        "generators": [{"label": x.label, "edge": x.edge, "orientation": x.orientation} for x in g.generators],
    }


def load_graph(source) -> MarkedMetricGraph:
    data, _ = _read(source)
    return graph_from_dict(data)


def save_graph(g: MarkedMetricGraph, path: PathLike) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g), indent=2) + "\n", encoding="utf-8")


# -- representations -------------------------------------------------------------


def parse_matrix(text, p: int) -> bt.MatSL2:
    if isinstance(text, list):
        text = "[[" + "],[".join(",".join(str(x) for x in row) for row in text) + "]]"
    return bt.MatSL2.parse(str(text), p)


def representation_from_dict(data: dict, source_labels: Optional[Sequence[str]] = None, base=None) -> Representation:
    n = int(_need(data, "source_rank", "representation"))
    target = _need(data, "target", "representation")
    kind = _need(target, "kind", "target")
    images = _need(data, "images", "representation")
    if isinstance(images, dict):
        labels = list(source_labels) if source_labels is not None else list(DEFAULT_LABELS[:n])
        missing = [lab for lab in labels[:n] if lab not in images]
        if missing:
            raise ParseError(f"no image for source generator(s) {missing}")
        raw = [images[lab] for lab in labels[:n]]
        extra = set(images) - set(labels[:n])
        if extra:
            raise ParseError(f"images given for unknown generators {sorted(extra)}")
    else:
        raw = list(images)
    if kind == "graph":
        gsrc = _need(target, "graph", "target")
        gdata, _ = _read(gsrc, base)
        tgt = graph_from_dict(gdata)
        words = tuple(parse_word(w, tgt.labels) if isinstance(w, str) else tuple(w) for w in raw)
        return Representation(n, GraphTarget(tgt, words))
    if kind == "sl2":
        p = check_prime(int(target.get("p", target.get("prime", 0))))
        return Representation(n, MatrixTarget(p, tuple(parse_matrix(m, p) for m in raw)))
    raise ParseError(f"unknown target kind {kind!r}")


def representation_to_dict(rep: Representation, source_labels: Optional[Sequence[str]] = None) -> dict:
    labels = list(source_labels) if source_labels is not None else list(DEFAULT_LABELS[: rep.source_rank])
    t = rep.target
    if isinstance(t, GraphTarget):
        target = {"kind": "graph", "graph": graph_to_dict(t.graph)}
        images = {lab: format_word(w, t.graph.labels) for lab, w in zip(labels, t.images)}
    else:
        target = {"kind": "sl2", "p": t.prime}
        images = {lab: str(m) for lab, m in zip(labels, t.images)}
    return {"source_rank": rep.source_rank, "target": target, "images": images}


def load_representation(source, source_labels: Optional[Sequence[str]] = None) -> Representation:
    data, base = _read(source)
    return representation_from_dict(data, source_labels, base)


# -- reports ---------------------------------------------------------------------


def stretch_report_to_dict(report: StretchReport, labels: Sequence[str] = DEFAULT_LABELS) -> dict:
    return {
        "value": format_fraction(report.value),
        "witness": format_word(report.witness, labels),
        "candidate_count": report.candidate_count,
        "table": [
            {
                "word": format_word(r.word, labels),
                "source_length": format_fraction(r.source_length),
                "target_length": format_fraction(r.target_length),
                "ratio": format_fraction(r.ratio),
            }
            for r in report.table
        ],
    }


def stretch_report_from_dict(data: dict, labels: Sequence[str] = DEFAULT_LABELS) -> StretchReport:
    rows = tuple(
        StretchRow(parse_word(r["word"], labels), to_fraction(r["source_length"]), to_fraction(r["target_length"]))
        for r in data["table"]
    )
    return StretchReport(to_fraction(data["value"]), parse_word(data["witness"], labels), int(data["candidate_count"]), rows)


def admissibility_report_to_dict(report, labels: Sequence[str] = DEFAULT_LABELS) -> dict:
    out = {
        "method": report.method,
        "c_rho": format_fraction(report.c_rho),
        "admissible": report.admissible,
        "verdict": {0: "admissible", 3: "not admissible", 4: "inconclusive"}[report.exit_code],
        "witness": format_word(report.witness, labels),
    }
    if report.delta is not None:
        out["delta"] = format_fraction(report.delta)
    if report.kobayashi_margin is not None:
        out["kobayashi_margin"] = [
            {
                "element": format_word(r.element, labels),
                "target_displacement": format_fraction(r.target_displacement),
                "delta": format_fraction(r.delta),
            }
            for r in report.kobayashi_margin
        ]
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


__all__ = [
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "save_graph",
    "parse_matrix",
    "representation_from_dict",
    "representation_to_dict",
    "load_representation",
    "stretch_report_to_dict",
    "stretch_report_from_dict",
    "admissibility_report_to_dict",
    "dumps",
]

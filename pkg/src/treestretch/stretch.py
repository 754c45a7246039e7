"""Minimal equivariant Lipschitz constants between tree actions.

For a free group acting on the universal cover of a marked graph and a
morphism into the isometries of a second tree, the least Lipschitz constant
of an equivariant map is the largest ratio of translation lengths
lambda(rho(gamma)) / lambda(gamma), and that maximum is reached on a
candidate loop (closed, non-backtracking, through each vertex at most
twice).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import bruhat_tits as bt
from .errors import InconsistentMap, RankMismatch
from .graph import (
    LengthTable,
    MarkedMetricGraph,
    candidates,
    displacement,
    inverse_path,
    normalize_volume,
    path_to_word,
    reduce_path,
    translation_length,
    validate,
)
from .words import FreeWord, ball, check_rank, cyclic_reduce, reduce_word, substitute, word_key


@dataclass(frozen=True)
class GraphTarget:
    graph: MarkedMetricGraph
    images: tuple  # one FreeWord in the target's generators per source generator


@dataclass(frozen=True)
class MatrixTarget:
    prime: int
    images: tuple  # one MatSL2 per source generator


@dataclass(frozen=True)
class Representation:
    source_rank: int
    target: Union[GraphTarget, MatrixTarget]

    def __post_init__(self):
        t = self.target
        if len(t.images) != self.source_rank:
            raise RankMismatch(f"{len(t.images)} images for a source of rank {self.source_rank}")
        if isinstance(t, GraphTarget):
            rank = validate(t.graph)
            object.__setattr__(t, "images", tuple(reduce_word(check_rank(tuple(w), rank)) for w in t.images))
        else:
            if any(m.prime != t.prime for m in t.images):
                raise bt.PrimeMismatch("matrix images must share the target prime")

    @property
    def kind(self) -> str:
        return "graph" if isinstance(self.target, GraphTarget) else "sl2"


def identity_representation(g: MarkedMetricGraph, target: Optional[MarkedMetricGraph] = None) -> Representation:
    """Change of marking: generator i of the source goes to generator i of the target."""
    target = g if target is None else target
    n = validate(g)
    if validate(target) != n:
        raise RankMismatch(f"ranks differ: {n} vs {target.rank}")
    return Representation(n, GraphTarget(target, tuple((i,) for i in range(1, n + 1))))


def matrix_representation(images: Sequence[bt.MatSL2]) -> Representation:
    images = tuple(images)
    return Representation(len(images), MatrixTarget(images[0].prime, images))


def image_matrix(rep: Representation, w: Sequence[int]) -> bt.MatSL2:
    out = bt.identity(rep.target.prime)
    for x in w:
        m = rep.target.images[abs(x) - 1]
        out = out @ (m if x > 0 else m.inverse())
    return out


def image_word(rep: Representation, w: Sequence[int]) -> FreeWord:
    return substitute(w, rep.target.images)


def image_translation_length(rep: Representation, w) -> Fraction:
    """lambda(rho(w)) on the target tree; 0 for elliptic images."""
    w = check_rank(tuple(w), rep.source_rank)
    if isinstance(rep.target, GraphTarget):
        return translation_length(rep.target.graph, image_word(rep, w))
    return Fraction(bt.lam(image_matrix(rep, w)))


def image_displacement(rep: Representation, w) -> Fraction:
    """d(y0, rho(w) y0) for the target base point y0."""
    w = check_rank(tuple(w), rep.source_rank)
    if isinstance(rep.target, GraphTarget):
        return displacement(rep.target.graph, image_word(rep, w))
    return Fraction(bt.mu(image_matrix(rep, w)))


@dataclass(frozen=True)
class StretchRow:
    word: FreeWord
    source_length: Fraction
    target_length: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.target_length / self.source_length


@dataclass(frozen=True)
class StretchReport:
    value: Fraction
    witness: FreeWord
    candidate_count: int
    table: tuple = field(repr=False)


def _better(ratio, word, best):
    if best is None:
        return True
    if ratio != best[0]:
        return ratio > best[0]
    return word_key(word) < word_key(best[1])


def _check_ranks(src: MarkedMetricGraph, rep: Representation) -> int:
    n = validate(src)
    if rep.source_rank != n:
        raise RankMismatch(f"representation has source rank {rep.source_rank}, graph has rank {n}")
    return n


def stretch_factor(src: MarkedMetricGraph, rep: Representation) -> StretchReport:
    """Max of lambda(rho(gamma)) / lambda(gamma) over the candidate loops of src.

    Ties go to the lexicographically least canonical word.
    """
    _check_ranks(src, rep)
    rows = []
    best = None
    for cand in candidates(src):
        row = StretchRow(cand.word, cand.length, image_translation_length(rep, cand.word))
        rows.append(row)
        if _better(row.ratio, row.word, best):
            best = (row.ratio, row.word)
    return StretchReport(best[0], best[1], len(rows), tuple(rows))


# -- brute-force oracle ---------------------------------------------------------


def _oracle_chunk(args):
    src, rep, words = args
    table = LengthTable(src)
    if isinstance(rep.target, GraphTarget):
        ttable = LengthTable(rep.target.graph)
        images = rep.target.images
        scale = Fraction(table.denominator, ttable.denominator)

        def target(w):
            return ttable.scaled(cyclic_reduce(substitute(w, images)))

    else:
        scale = Fraction(table.denominator)

        def target(w):
            return bt.lam(image_matrix(rep, w))

    best = None  # (num, den, word) with ratio num/den in scaled units
    for w in words:
        s = table.scaled(w)
        t = target(w)
        if best is None:
            best = (t, s, w)
            continue
        lhs, rhs = t * best[1], best[0] * s
        if lhs > rhs or (lhs == rhs and word_key(w) < word_key(best[2])):
            best = (t, s, w)
    if best is None:
        return None
    return (Fraction(best[0], best[1]) * scale, best[2])


def stretch_oracle(src: MarkedMetricGraph, rep: Representation, max_length: int, jobs: int = 1):
    """Max translation-length ratio over all conjugacy classes of word length <= max_length.

    Returns ``(value, witness)``. Works class by class on the whole ball, with
    no use of the candidate loops.
    """
    n = _check_ranks(src, rep)
    words = list(ball(n, max_length, conjugacy=True))
    if jobs > 1 and len(words) > 2000:
        size = math.ceil(len(words) / jobs)
        chunks = [(src, rep, words[i : i + size]) for i in range(0, len(words), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_oracle_chunk, chunks))
    else:
        results = [_oracle_chunk((src, rep, words))]
    best = None
    for res in results:
        if res is not None and _better(res[0], res[1], best):
            best = res
    return best


# -- piecewise-linear maps ------------------------------------------------------


@dataclass(frozen=True)
class TargetPoint:
    """A point of the target graph: a vertex, or ``offset`` along ``edge`` from its tail."""

    vertex: Optional[str] = None
    edge: Optional[str] = None
    offset: Fraction = Fraction(0)


@dataclass(frozen=True)
class PLMap:
    """A marking-respecting map between marked graphs.

    ``vertex_images`` sends each source vertex to a TargetPoint;
    ``edge_images`` sends each source edge id to the list of directed target
    edges it runs across, from the image of its tail to the image of its head
    (the first and last may be partially covered). ``tether`` is a target path
    from the target basepoint to the anchor of the image of the source
    basepoint (defaults to the spanning-tree path). A point inside an edge is
    anchored at that edge's tail.
    """

    vertex_images: dict
    edge_images: dict
    tether: Optional[tuple] = None


def _anchor(tgt: MarkedMetricGraph, pt: TargetPoint) -> str:
    if pt.vertex is not None:
        return pt.vertex
    return tgt.edge[pt.edge].tail


def _located_length(tgt: MarkedMetricGraph, start: TargetPoint, path, end: TargetPoint, what: str) -> Fraction:
    if not path:
        same = (start.vertex is not None and start.vertex == end.vertex) or (
            start.vertex is None and end.vertex is None and start.edge == end.edge and start.offset == end.offset
        )
        if not same:
            raise InconsistentMap(f"{what}: empty image path between distinct points")
        return Fraction(0)

    def position(pt, d):
        ell = tgt.length(d)
        return pt.offset if d[1] > 0 else ell - pt.offset

    total = Fraction(0)
    for i, d in enumerate(path):
        lo, hi = Fraction(0), tgt.length(d)
        if i == 0:
            if start.vertex is not None:
                if tgt.origin(d) != start.vertex:
                    raise InconsistentMap(f"{what}: path does not start at the image of the tail")
            elif d[0] != start.edge:
                raise InconsistentMap(f"{what}: path does not start on the edge carrying the tail image")
            else:
                lo = position(start, d)
        else:
            if tgt.origin(d) != tgt.terminus(path[i - 1]):
                raise InconsistentMap(f"{what}: image path is not connected")
        if i == len(path) - 1:
            if end.vertex is not None:
                if tgt.terminus(d) != end.vertex:
                    raise InconsistentMap(f"{what}: path does not end at the image of the head")
            elif d[0] != end.edge:
                raise InconsistentMap(f"{what}: path does not end on the edge carrying the head image")
            else:
                hi = position(end, d)
        if hi < lo:
            raise InconsistentMap(f"{what}: path runs backwards along {d[0]}")
        total += hi - lo
    return total


def _anchored_path(start: TargetPoint, path, end: TargetPoint) -> tuple:
    """Full-edge path between anchors homotopic to the located path (endpoints slid to anchors)."""
    path = list(path)
    if path and start.vertex is None and path[0][1] < 0:
        path = path[1:]
    if path and end.vertex is None and path[-1][1] > 0:
        path = path[:-1]
    return tuple(path)


def lipschitz_of_pl_map(src: MarkedMetricGraph, rep: Representation, pl: PLMap) -> Fraction:
    """Largest stretch (image path length / edge length) of a marking-respecting PL map.

    Raises InconsistentMap unless, for every source generator, the image of
    its loop conjugated by the tether reads exactly rho of that generator.
    """
    _check_ranks(src, rep)
    if not isinstance(rep.target, GraphTarget):
        raise TypeError("PL maps need a graph target")
    tgt = rep.target.graph
    missing = [v for v in src.vertices if v not in pl.vertex_images]
    missing += [e.id for e in src.edges if e.id not in pl.edge_images]
    if missing:
        raise InconsistentMap(f"map is undefined on {missing}")
    worst = Fraction(0)
    anchored = {}
    for e in src.edges:
        start, end = pl.vertex_images[e.tail], pl.vertex_images[e.head]
        path = tuple((str(x), int(s)) for x, s in pl.edge_images[e.id])
        length = _located_length(tgt, start, path, end, f"edge {e.id}")
        worst = max(worst, length / e.length)
        anchored[e.id] = _anchored_path(start, path, end)
    base_anchor = _anchor(tgt, pl.vertex_images[src.basepoint])
    tether = tgt.tree_path(tgt.basepoint, base_anchor) if pl.tether is None else tuple(pl.tether)
    for i in range(1, src.rank + 1):
        loop = []
        for eid, s in src.generator_loop(i):
            loop.extend(anchored[eid] if s > 0 else inverse_path(anchored[eid]))
        word = path_to_word(tgt, reduce_path(tuple(tether) + tuple(loop) + inverse_path(tether)))
        if word != rep.target.images[i - 1]:
            raise InconsistentMap(
                f"generator {src.labels[i - 1]} maps to {word}, expected {rep.target.images[i - 1]}"
            )
    return worst


# -- asymmetric distance on Outer space ---------------------------------------


@dataclass(frozen=True)
class OSDistance:
    ratio: Fraction
    witness: FreeWord
    normalized: tuple  # whether each input had to be rescaled to volume 1

    @property
    def log(self) -> float:
        return math.log(self.ratio)


def os_distance(y1: MarkedMetricGraph, y2: MarkedMetricGraph) -> OSDistance:
    """exp of the asymmetric Lipschitz distance from y1 to y2 (both rescaled to volume 1)."""
    n1, n2 = validate(y1), validate(y2)
    if n1 != n2:
        raise RankMismatch(f"ranks differ: {n1} vs {n2}")
    flags = (y1.volume != 1, y2.volume != 1)
    a = normalize_volume(y1) if flags[0] else y1
    b = normalize_volume(y2) if flags[1] else y2
    report = stretch_factor(a, identity_representation(a, b))
    return OSDistance(report.value, report.witness, flags)


__all__ = [
    "GraphTarget",
    "MatrixTarget",
    "Representation",
    "identity_representation",
    "matrix_representation",
    "image_matrix",
    "image_word",
    "image_translation_length",
    "image_displacement",
    "StretchRow",
    "StretchReport",
    "stretch_factor",
    "stretch_oracle",
    "TargetPoint",
    "PLMap",
    "lipschitz_of_pl_map",
    "OSDistance",
    "os_distance",
]

"""Standard graph families and seeded random instances.

Randomized suites read their seed from ``TREESTRETCH_SEED`` (fixed default),
so a failing case can always be replayed.
"""

from __future__ import annotations

import os
import random
from collections import deque
from fractions import Fraction
from typing import Optional

from . import bruhat_tits as bt
from .graph import MarkedMetricGraph, validate
from .padic import to_fraction
from .stretch import GraphTarget, Representation, matrix_representation
from .words import DEFAULT_LABELS, inverse, multiply

DEFAULT_SEED = 20240611


def seed() -> int:
    return int(os.environ.get("TREESTRETCH_SEED", DEFAULT_SEED))


def make_rng(offset: int = 0) -> random.Random:
    return random.Random(seed() + offset)


# -- markings --------------------------------------------------------------------


def mark(vertices, edges, basepoint=None, rng: Optional[random.Random] = None) -> MarkedMetricGraph:
    """Mark a connected metric graph.

    ``edges`` holds ``(id, tail, head, length)``. Without ``rng`` the marking
    uses a BFS tree and edge order; with it the spanning tree, the generator
    orientations and the order of the generators are all random.
    """
    vertices = [str(v) for v in vertices]
    edges = [(str(e), str(t), str(h), to_fraction(ell)) for e, t, h, ell in edges]
    base = str(basepoint) if basepoint is not None else vertices[0]
    adj = {v: [] for v in vertices}
    for e, t, h, _ in edges:
        adj[t].append((e, h))
        adj[h].append((e, t))
    seen, tree = {base}, set()
    if rng is None:
        queue = deque([base])
        while queue:
            v = queue.popleft()
            for e, w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    tree.add(e)
                    queue.append(w)
    else:
        # random spanning tree: grow from a random frontier edge
        frontier = list(adj[base])
        while frontier:
            e, w = frontier.pop(rng.randrange(len(frontier)))
            if w not in seen:
                seen.add(w)
                tree.add(e)
                frontier.extend(adj[w])
    loose = [e for e, _, _, _ in edges if e not in tree]
    if rng is not None:
        rng.shuffle(loose)
    gens = [
        (DEFAULT_LABELS[i], e, 1 if rng is None else rng.choice((1, -1)))
        for i, e in enumerate(loose)
    ]
    return MarkedMetricGraph(vertices, edges, base, tree, gens)


def remark(g: MarkedMetricGraph, rng: random.Random, basepoint=None) -> MarkedMetricGraph:
    """Same metric graph, fresh random marking."""
    return mark(g.vertices, [(e.id, e.tail, e.head, e.length) for e in g.edges], basepoint or g.basepoint, rng)


# -- families --------------------------------------------------------------------


def _lengths(count: int, lengths) -> list:
    if lengths is None:
        return [Fraction(1)] * count
    out = [to_fraction(x) for x in lengths]
    if len(out) != count:
        raise ValueError(f"expected {count} lengths, got {len(out)}")
    return out


def rose(rank: int, lengths=None) -> MarkedMetricGraph:
    ls = _lengths(rank, lengths)
    return mark(["o"], [(f"e{i + 1}", "o", "o", ls[i]) for i in range(rank)])


def theta(k: int = 3, lengths=None) -> MarkedMetricGraph:
    """k parallel edges between two vertices (rank k - 1)."""
    ls = _lengths(k, lengths)
    return mark(["u", "v"], [(f"e{i + 1}", "u", "v", ls[i]) for i in range(k)])


def figure_five(a) -> MarkedMetricGraph:
    """Two loops of length a joined by a bar of length 1 - 2a; x is the left loop, y the right."""
    a = to_fraction(a)
    return MarkedMetricGraph(
        ["y", "z"],
        [("l", "y", "y", a), ("s", "y", "z", 1 - 2 * a), ("r", "z", "z", a)],
        "y",
        ["s"],
        [("x", "l", 1), ("y", "r", 1)],
    )


def barbell(left, bar, right) -> MarkedMetricGraph:
    return mark(["y", "z"], [("l", "y", "y", left), ("s", "y", "z", bar), ("r", "z", "z", right)])


def complete_bipartite(m: int, n: int, lengths=None) -> MarkedMetricGraph:
    edges = [(f"e{i}{j}", f"u{i}", f"v{j}") for i in range(m) for j in range(n)]
    ls = _lengths(len(edges), lengths)
    verts = [f"u{i}" for i in range(m)] + [f"v{j}" for j in range(n)]
    return mark(verts, [(e, t, h, ell) for (e, t, h), ell in zip(edges, ls)])


def complete_graph(n: int, lengths=None) -> MarkedMetricGraph:
    edges = [(f"e{i}{j}", f"v{i}", f"v{j}") for i in range(n) for j in range(i + 1, n)]
    ls = _lengths(len(edges), lengths)
    return mark([f"v{i}" for i in range(n)], [(e, t, h, ell) for (e, t, h), ell in zip(edges, ls)])


def random_regular(valence: int, rank: int, rng: random.Random) -> MarkedMetricGraph:
    """Connected v-regular multigraph (loops allowed) with unit edges and the given rank."""
    if valence < 3 or (2 * (rank - 1)) % (valence - 2):
        raise ValueError(f"no {valence}-regular graph has rank {rank}")
    nv = 2 * (rank - 1) // (valence - 2)
    while True:
        stubs = [v for v in range(nv) for _ in range(valence)]
        rng.shuffle(stubs)
        pairs = list(zip(stubs[::2], stubs[1::2]))
        parent = list(range(nv))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            parent[find(a)] = find(b)
        if len({find(v) for v in range(nv)}) == 1:
            break
    edges = [(f"e{i}", f"v{a}", f"v{b}", 1) for i, (a, b) in enumerate(pairs)]
    return mark([f"v{i}" for i in range(nv)], edges, rng=rng)


# -- random metrics and maps -----------------------------------------------------


def random_length(rng: random.Random, max_den: int = 12) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(1, 2 * den), den)


def random_metric(g: MarkedMetricGraph, rng: random.Random, max_den: int = 12) -> MarkedMetricGraph:
    return g.with_lengths({e.id: random_length(rng, max_den) for e in g.edges})


SMALL_FAMILIES = ("rose2", "rose3", "theta3", "theta4", "barbell", "k4", "k23", "k24", "dumbbell3")


def small_graph(name: str) -> MarkedMetricGraph:
    """Unit-length members of the small families (at most four vertices)."""
    if name == "rose2":
        return rose(2)
    if name == "rose3":
        return rose(3)
    if name == "theta3":
        return theta(3)
    if name == "theta4":
        return theta(4)
    if name == "barbell":
        return barbell(1, 1, 1)
    if name == "k4":
        return complete_graph(4)
    if name == "k23":
        return complete_bipartite(2, 3)
    if name == "k24":
        return complete_bipartite(2, 4)
    if name == "dumbbell3":
        # a loop at each end of a theta: rank 3 with two trivalent junctions
        return mark(["u", "v"], [("l", "u", "u", 1), ("m", "u", "v", 1), ("n", "u", "v", 1), ("r", "v", "v", 1)])
    raise ValueError(f"unknown family {name!r}")


def random_graph(rng: random.Random, rank: Optional[int] = None, max_den: int = 12) -> MarkedMetricGraph:
    names = [n for n in SMALL_FAMILIES if rank is None or small_graph(n).rank == rank]
    g = small_graph(rng.choice(names))
    return random_metric(remark(g, rng, rng.choice(g.vertices)), rng, max_den)


def nielsen_images(rank: int, rng: random.Random, moves: int = 3) -> tuple:
    """Images of the generators under a random product of Nielsen moves."""
    images = [(i,) for i in range(1, rank + 1)]
    for _ in range(moves):
        i = rng.randrange(rank)
        kind = rng.randrange(3) if rank > 1 else 0
        if kind == 0:
            images[i] = inverse(images[i])
            continue
        j = rng.choice([k for k in range(rank) if k != i])
        other = images[j] if rng.random() < 0.5 else inverse(images[j])
        images[i] = multiply(images[i], other) if kind == 1 else multiply(other, images[i])
    return tuple(images)


# -- random matrices -------------------------------------------------------------


def _random_scalar(p: int, rng: random.Random, spread: int = 3) -> Fraction:
    e = rng.randint(-spread, spread)
    unit = Fraction(rng.choice([k for k in range(1, 2 * p + 2) if k % p]), rng.choice([k for k in range(1, p + 2) if k % p]))
    return rng.choice((1, -1)) * unit * Fraction(p) ** e


def random_sl2(p: int, rng: random.Random, factors: int = 3, spread: int = 3) -> bt.MatSL2:
    """Product of random elementary and diagonal matrices with entries p^e * unit, |e| <= spread."""
    m = bt.identity(p)
    for _ in range(factors):
        kind = rng.randrange(3)
        x = _random_scalar(p, rng, spread)
        m = m @ (bt.upper(x, p) if kind == 0 else bt.lower(x, p) if kind == 1 else bt.diag(x, p))
    return m


def random_hyperbolic(p: int, rng: random.Random, factors: int = 3, spread: int = 3) -> bt.MatSL2:
    while True:
        m = random_sl2(p, rng, factors, spread)
        if bt.is_hyperbolic(m):
            return m


def random_matrix_rep(rank: int, p: int, rng: random.Random) -> Representation:
    return matrix_representation([random_sl2(p, rng, rng.randint(1, 3), 2) for _ in range(rank)])


def random_graph_rep(src: MarkedMetricGraph, rng: random.Random, max_den: int = 12) -> Representation:
    """Graph target of the same rank: a remarked copy of a random small graph, with Nielsen-twisted images."""
    tgt = random_graph(rng, validate(src), max_den)
    return Representation(src.rank, GraphTarget(tgt, nielsen_images(src.rank, rng, rng.randint(0, 3))))


__all__ = [
    "DEFAULT_SEED",
    "seed",
    "make_rng",
    "mark",
    "remark",
    "rose",
    "theta",
    "figure_five",
    "barbell",
    "complete_bipartite",
    "complete_graph",
    "random_regular",
    "random_length",
    "random_metric",
    "SMALL_FAMILIES",
    "small_graph",
    "random_graph",
    "nielsen_images",
    "random_sl2",
    "random_hyperbolic",
    "random_matrix_rep",
    "random_graph_rep",
]

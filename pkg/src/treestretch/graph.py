"""Marked metric graphs and the free actions on their universal covers.

A marking is a spanning tree plus one labelled, oriented generator per
non-tree edge. Generator i is the based loop

    tree path base -> tail, the generator edge, tree path head -> base,

which identifies pi_1(Y, base) with F_n. A directed edge is a pair
``(edge_id, +1 | -1)``.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidGraph
from .padic import to_fraction
from .words import (
    FreeWord,
    canonical_cyclic,
    check_rank,
    cyclic_reduce,
    multiply,
    parse_word,
    reduce_word,
    word_key,
)

DirectedEdge = tuple


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Fraction


@dataclass(frozen=True)
class Generator:
    label: str
    edge: str
    orientation: int = 1


class MarkedMetricGraph:
    """A finite metric graph with a marking of its fundamental group."""

    def __init__(self, vertices, edges, basepoint, spanning_tree, generators):
        self.vertices = tuple(str(v) for v in vertices)
        self.edges = tuple(
            e if isinstance(e, Edge) else Edge(str(e[0]), str(e[1]), str(e[2]), to_fraction(e[3])) for e in edges
        )
        self.basepoint = str(basepoint)
        self.spanning_tree = frozenset(str(e) for e in spanning_tree)
        self.generators = tuple(
            g if isinstance(g, Generator) else Generator(str(g[0]), str(g[1]), int(g[2])) for g in generators
        )
        self._validated = False

    # -- basic structure -----------------------------------------------------

    @cached_property
    def edge(self) -> dict:
        return {e.id: e for e in self.edges}

    @property
    def labels(self) -> tuple:
        return tuple(g.label for g in self.generators)

    @property
    def rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def volume(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def origin(self, d: DirectedEdge) -> str:
        e = self.edge[d[0]]
        return e.tail if d[1] > 0 else e.head

    def terminus(self, d: DirectedEdge) -> str:
        e = self.edge[d[0]]
        return e.head if d[1] > 0 else e.tail

    def length(self, d: DirectedEdge) -> Fraction:
        return self.edge[d[0]].length

    @cached_property
    def outgoing(self) -> dict:
        out = defaultdict(list)
        for e in self.edges:
            out[e.tail].append((e.id, 1))
            out[e.head].append((e.id, -1))
        return dict(out)

    def valence(self, v: str) -> int:
        return len(self.outgoing.get(v, ()))

    @cached_property
    def _letter(self) -> dict:
        """Generator letter read when traversing each directed non-tree edge."""
        out = {}
        for i, g in enumerate(self.generators, start=1):
            out[(g.edge, g.orientation)] = i
            out[(g.edge, -g.orientation)] = -i
        return out

    def letter(self, d: DirectedEdge):
        return self._letter.get(d)

    @cached_property
    def _tree_paths(self) -> dict:
        """Directed edge path from the basepoint to every vertex inside the spanning tree."""
        paths = {self.basepoint: ()}
        queue = deque([self.basepoint])
        while queue:
            v = queue.popleft()
            for d in self.outgoing.get(v, ()):
                if d[0] in self.spanning_tree:
                    w = self.terminus(d)
                    if w not in paths:
                        paths[w] = paths[v] + (d,)
                        queue.append(w)
        return paths

    def tree_path(self, u: str, v: str) -> tuple:
        return reduce_path(inverse_path(self._tree_paths[u]) + self._tree_paths[v])

    def generator_loop(self, letter: int) -> tuple:
        g = self.generators[abs(letter) - 1]
        d = (g.edge, g.orientation)
        loop = self._tree_paths[self.origin(d)] + (d,) + inverse_path(self._tree_paths[self.terminus(d)])
        return loop if letter > 0 else inverse_path(loop)

    # -- derived graphs ------------------------------------------------------

    def with_lengths(self, lengths: dict) -> "MarkedMetricGraph":
        edges = [Edge(e.id, e.tail, e.head, to_fraction(lengths.get(e.id, e.length))) for e in self.edges]
        return MarkedMetricGraph(self.vertices, edges, self.basepoint, self.spanning_tree, self.generators)

    def scaled(self, factor) -> "MarkedMetricGraph":
        factor = to_fraction(factor)
        return self.with_lengths({e.id: e.length * factor for e in self.edges})

    def with_marking(self, spanning_tree, generators, basepoint=None) -> "MarkedMetricGraph":
        return MarkedMetricGraph(
            self.vertices, self.edges, self.basepoint if basepoint is None else basepoint, spanning_tree, generators
        )

    def __repr__(self):
        return f"MarkedMetricGraph(vertices={len(self.vertices)}, edges={len(self.edges)}, rank={self.rank})"


def inverse_path(path: Sequence[DirectedEdge]) -> tuple:
    return tuple((e, -s) for e, s in reversed(path))


def reduce_path(path: Iterable[DirectedEdge]) -> tuple:
    out: list = []
    for e, s in path:
        if out and out[-1] == (e, -s):
            out.pop()
        else:
            out.append((e, s))
    return tuple(out)


def cyclic_reduce_path(path: Sequence[DirectedEdge]) -> tuple:
    path = reduce_path(path)
    i, j = 0, len(path)
    while j - i >= 2 and path[i] == (path[j - 1][0], -path[j - 1][1]):
        i += 1
        j -= 1
    return path[i:j]


def path_length(g: MarkedMetricGraph, path: Iterable[DirectedEdge]) -> Fraction:
    return sum((g.length(d) for d in path), Fraction(0))


# -- validation -----------------------------------------------------------------


def validate(g: MarkedMetricGraph) -> int:
    """Check every invariant and return the rank; raise InvalidGraph listing all violations."""
    if g._validated:
        return g.rank
    problems = []
    vset = set(g.vertices)
    ids = [e.id for e in g.edges]
    if len(set(ids)) != len(ids):
        problems.append(("MarkingRankMismatch", "duplicate edge ids"))
    for e in g.edges:
        if e.tail not in vset or e.head not in vset:
            problems.append(("Disconnected", f"edge {e.id} has an endpoint outside the vertex set"))
        if e.length <= 0:
            problems.append(("NonpositiveLength", f"edge {e.id} has length {e.length}"))
    if g.basepoint not in vset:
        problems.append(("Disconnected", f"basepoint {g.basepoint} is not a vertex"))
    seen = set()
    if g.vertices:
        start = g.basepoint if g.basepoint in vset else g.vertices[0]
        seen.add(start)
        stack = [start]
        while stack:
            v = stack.pop()
            for d in g.outgoing.get(v, ()):
                w = g.terminus(d)
                if w not in seen and w in vset:
                    seen.add(w)
                    stack.append(w)
    if seen != vset:
        problems.append(("Disconnected", f"unreachable vertices {sorted(vset - seen)}"))
    for v in g.vertices:
        if g.valence(v) < 2:
            problems.append(("ValenceBelowTwo", f"vertex {v} has valence {g.valence(v)}"))
    rank = g.rank
    if len(g.generators) != rank:
        problems.append(("MarkingRankMismatch", f"{len(g.generators)} generators for rank {rank}"))
    gen_edges = [gen.edge for gen in g.generators]
    if set(gen_edges) & g.spanning_tree:
        problems.append(("MarkingRankMismatch", "a generator edge lies in the spanning tree"))
    if len(set(gen_edges)) != len(gen_edges):
        problems.append(("MarkingRankMismatch", "two generators share an edge"))
    if set(gen_edges) | g.spanning_tree != set(ids):
        problems.append(("MarkingRankMismatch", "tree and generator edges do not cover all edges"))
    if any(gen.orientation not in (1, -1) for gen in g.generators):
        problems.append(("MarkingRankMismatch", "generator orientation must be +1 or -1"))
    if len(set(g.labels)) != len(g.labels):
        problems.append(("MarkingRankMismatch", "duplicate generator labels"))
    if not problems:
        if len(g.spanning_tree) != len(g.vertices) - 1 or set(g._tree_paths) != vset:
            problems.append(("MarkingRankMismatch", "spanning tree edges do not form a spanning tree"))
    if problems:
        raise InvalidGraph(problems)
    g._validated = True
    return rank


# -- words and paths ------------------------------------------------------------


def as_word(g: MarkedMetricGraph, w) -> FreeWord:
    if isinstance(w, str):
        return parse_word(w, g.labels)
    return reduce_word(check_rank(tuple(w), g.rank))


def word_to_path(g: MarkedMetricGraph, w) -> tuple:
    """Reduced edge loop at the basepoint representing w under the marking."""
    validate(g)
    w = as_word(g, w)
    return reduce_path(d for x in w for d in g.generator_loop(x))


def path_to_word(g: MarkedMetricGraph, path: Iterable[DirectedEdge]) -> FreeWord:
    """Generator letters read along a path (tree edges read nothing)."""
    letters = (g.letter(d) for d in path)
    return reduce_word([x for x in letters if x is not None])


def displacement(g: MarkedMetricGraph, w) -> Fraction:
    """d(x0, w.x0) in the universal cover, x0 the lift of the basepoint."""
    return path_length(g, word_to_path(g, w))


def translation_length(g: MarkedMetricGraph, w) -> Fraction:
    """Length of the shortest loop freely homotopic to w."""
    return path_length(g, cyclic_reduce_path(word_to_path(g, w)))


class LengthTable:
    """Fast translation lengths of cyclically reduced words.

    The loop of a cyclically reduced word is the concatenation of generator
    loops; cancellation happens only inside the tree parts at each junction,
    so the translation length is a sum of per-letter lengths minus per-junction
    overlaps. Lengths are kept as integers over a common denominator.
    """

    def __init__(self, g: MarkedMetricGraph):
        validate(g)
        self.denominator = math.lcm(*(e.length.denominator for e in g.edges))
        letters = [i for i in range(1, g.rank + 1)] + [-i for i in range(1, g.rank + 1)]
        loops = {x: g.generator_loop(x) for x in letters}
        scale = self.denominator

        def ilen(path):
            return int(path_length(g, path) * scale)

        self.letter = {x: ilen(loops[x]) for x in letters}
        self.overlap = {}
        for x in letters:
            for y in letters:
                if y != -x:
                    joined = reduce_path(loops[x] + loops[y])
                    self.overlap[(x, y)] = (self.letter[x] + self.letter[y] - ilen(joined)) // 2

    def scaled(self, w: Sequence[int]) -> int:
        """Translation length times ``denominator`` for a cyclically reduced w."""
        if not w:
            return 0
        total = 0
        prev = w[-1]
        for x in w:
            total += self.letter[x] - 2 * self.overlap[(prev, x)]
            prev = x
        return total

    def __call__(self, w: Sequence[int]) -> Fraction:
        return Fraction(self.scaled(cyclic_reduce(w)), self.denominator)


# -- candidate loops ------------------------------------------------------------


class Candidate(NamedTuple):
    word: FreeWord
    cycle: tuple
    length: Fraction


def _cycle_canonical(cycle, order):
    best = None
    for c in (cycle, inverse_path(cycle)):
        for k in range(len(c)):
            r = c[k:] + c[:k]
            key = tuple(order[d] for d in r)
            if best is None or key < best[0]:
                best = (key, r)
    return best[1]


def candidates(g: MarkedMetricGraph) -> list:
    """Closed non-backtracking edge loops through each vertex at most twice.

    One entry per conjugacy class up to inversion, sorted by the canonical
    cyclic form of its word.
    """
    validate(g)
    directed = [(e.id, s) for e in g.edges for s in (1, -1)]
    order = {d: i for i, d in enumerate(directed)}
    found = {}
    for start in directed:
        v0 = g.origin(start)
        k0 = order[start]
        visits = Counter({g.terminus(start): 1})
        path = [start]

        def extend():
            last = path[-1]
            end = g.terminus(last)
            if end == v0 and last != (start[0], -start[1]):
                cyc = _cycle_canonical(tuple(path), order)
                found.setdefault(cyc, None)
            for d in g.outgoing[end]:
                if order[d] < k0 or d == (last[0], -last[1]):
                    continue
                w = g.terminus(d)
                if visits[w] >= 2:
                    continue
                visits[w] += 1
                path.append(d)
                extend()
                path.pop()
                visits[w] -= 1

        extend()
    out = []
    for cyc in found:
        word = canonical_cyclic(path_to_word(g, cyc))
        out.append(Candidate(word, cyc, path_length(g, cyc)))
    out.sort(key=lambda c: (len(c.word), word_key(c.word)))
    return out


# -- Dirichlet domain -------------------------------------------------------------


class DirichletData(NamedTuple):
    delta: Fraction
    F: frozenset
    radius: Fraction


def _graph_distances(g):
    dist = {g.basepoint: Fraction(0)}
    heap = [(Fraction(0), g.basepoint)]
    done = set()
    while heap:
        dv, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for d in g.outgoing.get(v, ()):
            w = g.terminus(d)
            nd = dv + g.length(d)
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def _nearest_words(g, dist):
    """For each vertex, the words read along all shortest paths to the basepoint."""
    near = {g.basepoint: {()}}
    for v in sorted(dist, key=lambda v: dist[v]):
        if v == g.basepoint:
            continue
        words = set()
        for d in g.outgoing[v]:
            w = g.terminus(d)
            if w in near and dist[v] == g.length(d) + dist[w]:
                x = g.letter(d)
                prefix = (x,) if x is not None else ()
                words.update(multiply(prefix, u) for u in near[w])
        near[v] = words
    return near


def dirichlet_delta(g: MarkedMetricGraph) -> DirichletData:
    """Dirichlet domain D of the basepoint lift x0 in the universal cover.

    Returns delta, the distance from D to the complement of the union of D
    with its translates meeting D, together with F = {gamma != 1 : gamma D
    meets D}. A point lies in gamma D exactly when gamma x0 is among its
    nearest orbit points; on each cover edge the nearest orbit points are
    read off the two endpoints, switching at one breakpoint. The cover is
    explored outward from x0, stopping on each branch at the first point
    outside the union (distance to D only grows further out).
    """
    validate(g)
    dist = _graph_distances(g)
    near = _nearest_words(g, dist)

    def nset(vertex):
        v, gamma = vertex
        return {multiply(gamma, u) for u in near[v]}

    def edges_out(vertex, came_by):
        v, gamma = vertex
        for d in g.outgoing[v]:
            if came_by is not None and d == (came_by[0], -came_by[1]):
                continue
            x = g.letter(d)
            yield d, (g.terminus(d), multiply(gamma, (x,)) if x is not None else gamma)

    def split(vertex, d, nxt):
        ell = g.length(d)
        t_star = (dist[nxt[0]] + ell - dist[vertex[0]]) / 2
        return ell, t_star

    root = (g.basepoint, ())
    # pass 1: D and F
    F = set()
    stack = [(root, None)]
    while stack:
        vertex, came_by = stack.pop()
        here = nset(vertex)
        F.update(here)
        for d, nxt in edges_out(vertex, came_by):
            there = nset(nxt)
            if () in there:
                F.update(there)
                stack.append((nxt, d))
            else:
                # the breakpoint sees both endpoints' nearest orbit points and lies in D
                F.update(there)
    F.discard(())
    S = F | {()}

    # pass 2: delta
    delta = None
    radius = Fraction(0)
    stack = [(root, None, Fraction(0), Fraction(0))]  # vertex, came_by, d(x0, v), d(v, D)
    while stack:
        vertex, came_by, depth, off = stack.pop()
        here = nset(vertex)
        for d, nxt in edges_out(vertex, came_by):
            there = nset(nxt)
            ell, t_star = split(vertex, d, nxt)
            radius = max(radius, depth + ell)
            if () in there:
                stack.append((nxt, d, depth + ell, Fraction(0)))
                continue
            in_d_start = () in here

            def off_d(t):
                if in_d_start:
                    return max(Fraction(0), t - t_star)
                return off + t

            if t_star > 0 and not (here & S):
                hit = Fraction(0)
            elif not ((here | there) & S):
                hit = t_star
            elif t_star < ell and not (there & S):
                hit = t_star
            else:
                stack.append((nxt, d, depth + ell, off_d(ell)))
                continue
            cand = off_d(hit)
            if delta is None or cand < delta:
                delta = cand
    return DirichletData(delta, frozenset(F), radius)


def candidate_displacement_bound(g: MarkedMetricGraph) -> Fraction:
    """4 * #vertices * (longest edge): the finite-set bound with edge lengths made explicit."""
    validate(g)
    return 4 * len(g.vertices) * max(e.length for e in g.edges)


def max_generator_displacement(g: MarkedMetricGraph) -> Fraction:
    return max(displacement(g, (i,)) for i in range(1, g.rank + 1))


# -- metric normalisation ---------------------------------------------------------


def normalize_volume(g: MarkedMetricGraph) -> MarkedMetricGraph:
    validate(g)
    return g.scaled(1 / g.volume)


def edge_count_formula(rank: int, valence) -> Fraction:
    """Number of edges of a graph of average valence v with free fundamental group of the given rank."""
    v = to_fraction(valence)
    return Fraction(rank - 1) / (1 - 2 / v)


__all__ = [
    "Edge",
    "Generator",
    "MarkedMetricGraph",
    "inverse_path",
    "reduce_path",
    "cyclic_reduce_path",
    "path_length",
    "validate",
    "as_word",
    "word_to_path",
    "path_to_word",
    "displacement",
    "translation_length",
    "LengthTable",
    "Candidate",
    "candidates",
    "DirichletData",
    "dirichlet_delta",
    "candidate_displacement_bound",
    "max_generator_displacement",
    "normalize_volume",
    "edge_count_formula",
]

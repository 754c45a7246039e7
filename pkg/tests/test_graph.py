from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import candidate_words_oracle, dirichlet_grid_oracle
from treestretch.errors import BadWord, InvalidGraph
from treestretch.graph import (
    LengthTable,
    MarkedMetricGraph,
    candidate_displacement_bound,
    candidates,
    dirichlet_delta,
    displacement,
    edge_count_formula,
    max_generator_displacement,
    normalize_volume,
    path_length,
    translation_length,
    validate,
    word_to_path,
)
from treestretch.instances import (
    SMALL_FAMILIES,
    figure_five,
    random_graph,
    random_regular,
    rose,
    small_graph,
    theta,
)
from treestretch.words import ball, canonical_cyclic, conjugate, inverse, power

A = Fraction(1, 4)


def test_validate_examples():
    assert validate(rose(2)) == 2
    assert validate(figure_five(A)) == 2
    assert validate(theta(3)) == 2


def test_validate_collects_all_problems():
    g = MarkedMetricGraph(
        ["u", "v", "w"],
        [("e", "u", "u", 0), ("f", "v", "v", -1)],
        "u",
        [],
        [("a", "e", 1)],
    )
    with pytest.raises(InvalidGraph) as info:
        validate(g)
    kinds = set(info.value.kinds)
    assert {"Disconnected", "ValenceBelowTwo", "NonpositiveLength", "MarkingRankMismatch"} <= kinds


def test_word_to_path_examples():
    r = rose(2)
    assert path_length(r, word_to_path(r, (1,))) == 1
    assert word_to_path(r, (1, -1)) == ()
    y = figure_five(A)
    assert word_to_path(y, (2,)) == (("s", 1), ("r", 1), ("s", -1))
    assert displacement(y, (2,)) == 2 * (1 - 2 * A) + A
    with pytest.raises(BadWord):
        word_to_path(r, (3,))


def test_displacement_and_translation_examples():
    r = rose(2)
    assert displacement(r, (1, 2)) == 2
    assert displacement(r, (1, 2, -1)) == 3
    assert displacement(r, ()) == 0
    assert translation_length(r, (1, 2, -1)) == 1
    for a in (Fraction(1, 4), Fraction(1, 3)):
        y = figure_five(a)
        assert translation_length(y, (2,)) == a
        assert translation_length(y, (1, 2)) == 2 - 2 * a


def _random_graphs(rng, count=12, max_den=12):
    return [random_graph(rng, max_den=max_den) for _ in range(count)]


def test_translation_length_laws(rng):
    for g in _random_graphs(rng):
        for w in list(ball(g.rank, 3))[:: 7]:
            u = (rng.choice([1, -1]) * rng.randint(1, g.rank),)
            t = translation_length(g, w)
            assert t > 0
            assert translation_length(g, conjugate(w, u)) == t
            assert t <= displacement(g, w)
            for n in range(1, 6):
                assert translation_length(g, power(w, n)) == n * t
            # independent tree identity: lambda = d(x, g^2 x) - d(x, g x)
            assert t == displacement(g, power(w, 2)) - displacement(g, w)


def test_length_table_matches_translation_length(rng):
    for g in _random_graphs(rng, 8):
        table = LengthTable(g)
        for w in ball(g.rank, 4, conjugacy=True):
            assert table(w) == translation_length(g, w)


def test_candidates_examples():
    r = rose(2)
    words = [c.word for c in candidates(r)]
    assert words == [(1,), (2,), (1, 1), (1, 2), (1, -2), (2, 2)]
    y = candidates(figure_five(A))
    assert {(1,), (2,), (1, 2), (1, -2)} <= {c.word for c in y}
    t = {c.word for c in candidates(theta(3))}
    # the three simple loops, plus the loops that use a vertex twice
    simple = {c.word for c in candidates(theta(3)) if len(c.cycle) == 2}
    assert len(simple) == 3 and simple <= t


@pytest.mark.parametrize("name", SMALL_FAMILIES)
def test_candidates_match_walk_enumeration(name):
    g = small_graph(name)
    assert {c.word for c in candidates(g)} == candidate_words_oracle(g)


def test_candidates_random_match_walk_enumeration(rng):
    for g in _random_graphs(rng, 10):
        got = candidates(g)
        assert {c.word for c in got} == candidate_words_oracle(g)
        bound = candidate_displacement_bound(g)
        for c in got:
            assert canonical_cyclic(c.word) == c.word
            assert canonical_cyclic(inverse(c.word)) == c.word  # closed under inversion
            assert c.length == translation_length(g, c.word) <= bound
            visits = {}
            for d in c.cycle:
                v = g.origin(d)
                visits[v] = visits.get(v, 0) + 1
            assert max(visits.values()) <= 2


def test_dirichlet_examples():
    d = dirichlet_delta(rose(2))
    assert d.delta == 1 and d.F == {(1,), (-1,), (2,), (-2,)}
    d2 = dirichlet_delta(rose(2, [2, 2]))
    assert d2.delta == 2 and d2.F == d.F
    y = dirichlet_delta(figure_five(A))
    assert (y.delta, y.F) == dirichlet_grid_oracle(figure_five(A))


@pytest.mark.parametrize("name", SMALL_FAMILIES)
def test_dirichlet_matches_grid_oracle(name):
    g = small_graph(name)
    d = dirichlet_delta(g)
    assert (d.delta, d.F) == dirichlet_grid_oracle(g)


def test_dirichlet_random_matches_grid_oracle(rng):
    checked = 0
    while checked < 8:
        g = random_graph(rng, max_den=2)
        if max(e.length for e in g.edges) * 2 > 6:
            continue
        d = dirichlet_delta(g)
        assert (d.delta, d.F) == dirichlet_grid_oracle(g)
        checked += 1


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=Fraction(1, 7), max_value=7, max_denominator=7), st.integers(0, 10**6))
def test_dirichlet_scaling(c, seed):
    import random

    g = random_graph(random.Random(seed), max_den=4)
    d, e = dirichlet_delta(g), dirichlet_delta(g.scaled(c))
    assert e.delta == c * d.delta and e.F == d.F


def test_normalize_volume():
    n = normalize_volume(rose(2))
    assert [e.length for e in n.edges] == [Fraction(1, 2)] * 2
    assert normalize_volume(n).edges == n.edges
    y = figure_five(A)
    assert normalize_volume(y).edges == y.edges


def test_edge_count_formula_on_regular_graphs(rng):
    for n in range(2, 7):
        for v in range(3, 2 * n + 1):
            if (2 * (n - 1)) % (v - 2):
                continue
            g = random_regular(v, n, rng)
            assert validate(g) == n
            assert all(g.valence(x) == v for x in g.vertices)
            assert len(g.edges) == edge_count_formula(n, v)


def test_dirichlet_translates_stay_near(rng):
    # D sits in the ball of radius M/2, so every gamma in F moves x0 by at most M
    for _ in range(40):
        g = random_graph(rng)
        d = dirichlet_delta(g)
        M = max_generator_displacement(g)
        assert all(displacement(g, w) <= M for w in d.F)
        assert d.delta <= Fraction(3, 2) * M

"""Admissibility of a morphism from a free group into the isometries of a tree.

The exact verdict is C < 1 for the stretch factor C. The Kobayashi test is a
cheaper sufficient condition read off the Dirichlet domain of the source.
Shell profiles are a finite-scale picture of properness and prove nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import bruhat_tits as bt
from .graph import MarkedMetricGraph, dirichlet_delta, displacement, validate
from .stretch import Representation, _check_ranks, image_displacement, image_matrix, stretch_factor
from .words import FreeWord, ball, inverse, reduce_word, word_key

EXACT = "exact"
KOBAYASHI = "kobayashi"


@dataclass(frozen=True)
class MarginRow:
    element: FreeWord
    target_displacement: Fraction
    delta: Fraction

    @property
    def ok(self) -> bool:
        return self.target_displacement < self.delta


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of an admissibility test.

    With ``method == "exact"``, ``admissible`` is ``c_rho < 1``. With
    ``method == "kobayashi"``, ``admissible`` is True when the test succeeds
    and None when it is inconclusive; ``c_rho`` is then the upper bound
    max mu'(rho(gamma)) / delta over F on the stretch factor.
    """

    c_rho: Fraction
    admissible: Optional[bool]
    witness: FreeWord
    method: str
    delta: Optional[Fraction] = None
    kobayashi_margin: Optional[tuple] = None

    @property
    def exit_code(self) -> int:
        if self.admissible is None:
            return 4
        return 0 if self.admissible else 3


def admissible(src: MarkedMetricGraph, rep: Representation) -> AdmissibilityReport:
    report = stretch_factor(src, rep)
    return AdmissibilityReport(report.value, report.value < 1, report.witness, EXACT)


def kobayashi_sufficient(src: MarkedMetricGraph, rep: Representation) -> AdmissibilityReport:
    """Sufficient test: mu'(rho(gamma)) < delta for every gamma in F."""
    _check_ranks(src, rep)
    data = dirichlet_delta(src)
    rows = tuple(
        MarginRow(g, image_displacement(rep, g), data.delta) for g in sorted(data.F, key=lambda w: (len(w), word_key(w)))
    )
    worst = max(rows, key=lambda r: r.target_displacement, default=None)
    if worst is None:
        bound, witness = Fraction(0), ()
    else:
        bound, witness = worst.target_displacement / data.delta, worst.element
    verdict = True if all(r.ok for r in rows) else None
    return AdmissibilityReport(bound, verdict, witness, KOBAYASHI, data.delta, rows)


# -- word length with respect to F ---------------------------------------------


def f_word_length(target: FreeWord, F: Iterable[FreeWord], limit: int = 12) -> Optional[int]:
    """Least k with target a product of k elements of F (None beyond ``limit``).

    Meets in the middle: balls grow alternately around 1 and around target.
    """
    target = reduce_word(target)
    if not target:
        return 0
    gens = sorted(set(reduce_word(f) for f in F) | set(inverse(reduce_word(f)) for f in F))
    if target in gens:
        return 1
    near, far = {(): 0}, {target: 0}
    near_front, far_front = [()], [target]
    rn = rf = 0
    while rn + rf < limit:
        grow_near = len(near_front) <= len(far_front)
        front, seen, other = (near_front, near, far) if grow_near else (far_front, far, near)
        radius = (rn if grow_near else rf) + 1
        new = []
        for w in front:
            for f in gens:
                v = reduce_word(w + f)
                if v in seen:
                    continue
                seen[v] = radius
                if v in other:
                    return radius + other[v]
                new.append(v)
        if grow_near:
            near_front, rn = new, radius
        else:
            far_front, rf = new, radius
        if not new:
            return None
    return None


@dataclass(frozen=True)
class WordLengthRow:
    element: FreeWord
    f_length: Optional[int]
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.f_length is not None and self.f_length <= self.bound


def word_length_bound_check(src: MarkedMetricGraph, sample: Iterable[FreeWord]) -> tuple:
    """Check l_F(gamma) <= d(x0, gamma x0)/delta + 1 on each sampled gamma."""
    validate(src)
    data = dirichlet_delta(src)
    rows = []
    for g in sample:
        g = reduce_word(tuple(g))
        bound = displacement(src, g) / data.delta + 1
        rows.append(WordLengthRow(g, f_word_length(g, data.F, limit=int(bound) + 1), bound))
    return tuple(rows)


# -- shell profiles ------------------------------------------------------------


@dataclass(frozen=True)
class ProfileRow:
    """Minima over the reduced words of one length.

    ``gap`` is min of d(x0, g x0) - d(y0, rho(g) y0); ``source_min`` is the
    least source displacement on the shell; ``probe`` (matrix mode only) is
    min mu(sigma(g) h rho(g)^-1) for the probe matrix h.
    """

    length: int
    gap: Fraction
    witness: FreeWord
    source_min: Fraction
    probe: Optional[int] = None


def admissibility_profile(
    src: MarkedMetricGraph,
    rep: Representation,
    max_length: int,
    schottky: Optional[Representation] = None,
    probe: Optional[bt.MatSL2] = None,
) -> tuple:
    """Per-shell minimum displacement gap for word lengths 1..max_length.

    ``schottky`` (a matrix representation of the same free group) together
    with ``probe`` switches on matrix mode.
    """
    n = _check_ranks(src, rep)
    if max_length < 1:
        raise ValueError("max_length must be positive")
    if (schottky is None) != (probe is None):
        raise ValueError("matrix mode needs both a Schottky representation and a probe matrix")
    shells: dict = {}
    for w in ball(n, max_length):
        src_d = displacement(src, w)
        gap = src_d - image_displacement(rep, w)
        row = shells.get(len(w))
        extra = None
        if probe is not None:
            extra = bt.mu(image_matrix(schottky, w) @ probe @ image_matrix(rep, w).inverse())
        if row is None:
            shells[len(w)] = [gap, w, src_d, extra]
            continue
        if gap < row[0]:
            row[0], row[1] = gap, w
        row[2] = min(row[2], src_d)
        if extra is not None:
            row[3] = min(row[3], extra)
    return tuple(ProfileRow(k, *shells[k]) for k in sorted(shells))


__all__ = [
    "EXACT",
    "KOBAYASHI",
    "MarginRow",
    "AdmissibilityReport",
    "admissible",
    "kobayashi_sufficient",
    "f_word_length",
    "WordLengthRow",
    "word_length_bound_check",
    "ProfileRow",
    "admissibility_profile",
]

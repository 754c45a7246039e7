"""The Bruhat-Tits tree of SL2(Q_p).

Vertices are homothety classes of Z_p-lattices in Q_p^2, stored in the normal
form <p^n e1, u e1 + e2> with u taken modulo p^n Z_p. Ends of the tree are
points of P^1(Q_p). Every edge has length 1, so the Cartan projection ``mu``
and translation length ``lam`` are even integers.

Conventions: the positive chamber is Z+ = {diag(a, 1/a) : val(a) <= 0}.
diag(1/p, p) pushes the base vertex toward [1:0], so the common repelling
end of Z+ is [0:1].
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import InKError, NotHyperbolic, NotInSL2, ParseError, PrimeMismatch
from .padic import (
    INF,
    check_prime,
    eigenvalue_valuations,
    format_fraction,
    hensel_split,
    residue,
    to_fraction,
    val,
)


def _same_prime(*objs):
    primes = {o.prime for o in objs}
    if len(primes) != 1:
        raise PrimeMismatch(f"objects live over different primes: {sorted(primes)}")
    return primes.pop()


@dataclass(frozen=True)
class MatSL2:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        for name in "abcd":
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.a * self.d - self.b * self.c != 1:
            raise NotInSL2(f"determinant of {self} is {self.a * self.d - self.b * self.c}, not 1")

    @classmethod
    def parse(cls, text: str, p: int) -> "MatSL2":
        """Parse ``"[[a,b],[c,d]]"`` with rational entries ``num/den``."""
        compact = re.sub(r"\s+", "", text)
        m = re.fullmatch(r"\[\[([^,\[\]]+),([^,\[\]]+)\],\[([^,\[\]]+),([^,\[\]]+)\]\]", compact)
        if not m:
            raise ParseError(f"not a 2x2 matrix literal: {text!r}")
        return cls(*(to_fraction(x) for x in m.groups()), p)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: "MatSL2") -> "MatSL2":
        _same_prime(self, other)
        return MatSL2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.prime,
        )

    def inverse(self) -> "MatSL2":
        return MatSL2(self.d, -self.b, -self.c, self.a, self.prime)

    def __pow__(self, n: int) -> "MatSL2":
        base = self if n >= 0 else self.inverse()
        out = identity(self.prime)
        for _ in range(abs(n)):
            out = out @ base
        return out

    def is_integral(self) -> bool:
        return all(val(x, self.prime) >= 0 for x in self.entries)

    def __str__(self):
        a, b, c, d = (format_fraction(x) for x in self.entries)
        return f"[[{a},{b}],[{c},{d}]]"


def identity(p: int) -> MatSL2:
    return MatSL2(1, 0, 0, 1, p)


def diag(x, p: int) -> MatSL2:
    x = to_fraction(x)
    return MatSL2(x, 0, 0, 1 / x, p)


def upper(x, p: int) -> MatSL2:
    return MatSL2(1, to_fraction(x), 0, 1, p)


def lower(x, p: int) -> MatSL2:
    return MatSL2(1, 0, to_fraction(x), 1, p)


def weyl(p: int) -> MatSL2:
    return MatSL2(0, -1, 1, 0, p)


def _min_val(entries, p):
    return min(val(x, p) for x in entries)


def mu(g: MatSL2) -> int:
    """Cartan projection: d(x0, g x0) = -2 * (smallest entry valuation), clamped at 0."""
    return -2 * min(0, _min_val(g.entries, g.prime))


def lam(g: MatSL2) -> int:
    """Translation length of g on the tree: 2 * max(0, -val(trace))."""
    v, w = eigenvalue_valuations(g.trace, g.prime)
    return w - v


def is_hyperbolic(g: MatSL2) -> bool:
    return lam(g) > 0


@dataclass(frozen=True)
class CartanTriple:
    k1: MatSL2
    z: MatSL2
    k2: MatSL2

    @property
    def product(self) -> MatSL2:
        return self.k1 @ self.z @ self.k2


def cartan(g: MatSL2) -> CartanTriple:
    """Write g = k1 z k2 with k1, k2 in SL2(Z_p) and z = diag(p^-m, p^m), m >= 0.

    Pivots on an entry of least valuation, moves it to the top-left corner
    with the Weyl element, then clears the off-diagonal by integral
    elementary operations.
    """
    p = g.prime
    one = identity(p)
    if mu(g) == 0:
        return CartanTriple(g, one, one)
    w = weyl(p)
    left, right = one, one
    h = g
    entries = {(0, 0): h.a, (0, 1): h.b, (1, 0): h.c, (1, 1): h.d}
    i, j = min(entries, key=lambda ij: (val(entries[ij], p), ij))
    if i == 1:
        left = w @ left
        h = w @ h
    if j == 1:
        right = right @ w
        h = h @ w
    x = h.a
    lo = lower(-h.c / x, p)
    hi = upper(-h.b / x, p)
    left = lo @ left
    right = right @ hi
    # left @ g @ right == diag(x, 1/x) now.
    m = val(x, p)
    unit = x / Fraction(p) ** m
    z = diag(Fraction(p) ** m, p)
    k1 = left.inverse() @ diag(unit, p)
    k2 = right.inverse()
    return CartanTriple(k1, z, k2)


# -- vertices -----------------------------------------------------------------


def _reduce_translate(u: Fraction, n: int, p: int) -> Fraction:
    """Canonical representative of u modulo p^n Z_p."""
    if u == 0 or val(u, p) >= n:
        return Fraction(0)
    j = max(0, -val(u, p))
    scaled = u * p**j
    return Fraction(residue(scaled, p, n + j), p**j)


@dataclass(frozen=True)
class BTVertex:
    """Lattice class <p^level e1, translate e1 + e2> with translate mod p^level."""

    level: int
    translate: Fraction
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        object.__setattr__(self, "translate", _reduce_translate(to_fraction(self.translate), self.level, self.prime))

    @property
    def parity(self) -> int:
        return self.level % 2

    def basis(self):
        p = self.prime
        return [[Fraction(p) ** self.level, self.translate], [Fraction(0), Fraction(1)]]

    def __str__(self):
        return f"({self.level}; {format_fraction(self.translate)} mod {self.prime}^{self.level})"


def base_vertex(p: int) -> BTVertex:
    return BTVertex(0, Fraction(0), p)


def lattice_class(m, p: int) -> BTVertex:
    """Normal form of the lattice spanned by the columns of an invertible 2x2 matrix."""
    (a, b), (c, d) = [[Fraction(x) for x in row] for row in m]
    if d == 0 or (c != 0 and val(c, p) < val(d, p)):
        a, b, c, d = b, a, d, c
    factor = c / d
    a, c = a - factor * b, c - factor * d
    if a == 0:
        raise ValueError("lattice basis is singular")
    n = val(a, p) - val(d, p)
    return BTVertex(n, b / d, p)


def _mat_mul(x, y):
    return [[sum(x[i][k] * y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def act_vertex(g: MatSL2, v: BTVertex) -> BTVertex:
    _same_prime(g, v)
    return lattice_class(_mat_mul(g.rows(), v.basis()), g.prime)


def _gap(m, p):
    """Elementary divisor gap of an invertible 2x2 matrix: val(det) - 2 min val."""
    (a, b), (c, d) = m
    return val(a * d - b * c, p) - 2 * _min_val((a, b, c, d), p)


def vertex_dist(v: BTVertex, w: BTVertex) -> int:
    p = _same_prime(v, w)
    (a, b), (c, d) = v.basis()
    det = a * d - b * c
    inv = [[d / det, -b / det], [-c / det, a / det]]
    return _gap(_mat_mul(inv, w.basis()), p)


# -- boundary -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point of P^1(Q_p), stored as [1:t] with val(t) >= 0 or [t:1] with val(t) > 0."""

    x: Fraction
    y: Fraction
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        x, y = to_fraction(self.x), to_fraction(self.y)
        if x == 0 and y == 0:
            raise ValueError("[0:0] is not a point of P^1")
        p = self.prime
        if x != 0 and val(x, p) <= val(y, p):
            x, y = Fraction(1), y / x
        else:
            x, y = x / y, Fraction(1)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return self.prime == other.prime and self.x * other.y == self.y * other.x

    def __hash__(self):
        return hash((self.x, self.y, self.prime))

    def __str__(self):
        return f"[{format_fraction(self.x)}:{format_fraction(self.y)}]"


def act_boundary(g: MatSL2, xi: BoundaryPoint) -> BoundaryPoint:
    _same_prime(g, xi)
    return BoundaryPoint(g.a * xi.x + g.b * xi.y, g.c * xi.x + g.d * xi.y, g.prime)


class BoundaryDistance(NamedTuple):
    """Visual distance q^-r based at x0; ``r`` is the Gromov product (inf on the diagonal)."""

    r: float
    value: Fraction


def gromov_product(xi: BoundaryPoint, eta: BoundaryPoint):
    p = _same_prime(xi, eta)
    return val(xi.x * eta.y - xi.y * eta.x, p)


def boundary_dist(xi: BoundaryPoint, eta: BoundaryPoint) -> BoundaryDistance:
    r = gromov_product(xi, eta)
    if r == INF:
        return BoundaryDistance(INF, Fraction(0))
    return BoundaryDistance(r, Fraction(1, xi.prime**r))


def ray_vertex(xi: BoundaryPoint, depth: int) -> BTVertex:
    """Vertex at distance ``depth`` from x0 on the ray toward xi."""
    p = xi.prime
    pk = Fraction(p) ** depth
    if val(xi.x, p) == 0:
        basis = [[xi.x, 0], [xi.y, pk]]
    else:
        basis = [[xi.x, pk], [xi.y, 0]]
    return lattice_class(basis, p)


REPELLING_END_OF_CHAMBER = (0, 1)


def zeta_minus(g: MatSL2) -> BoundaryPoint:
    """k2^-1 applied to the repelling end [0:1] of the positive chamber.

    Different Cartan decompositions move this end only inside the ball of
    ends whose ray passes through g^-1 x0. We return the canonical point of
    that ball (affine coordinate reduced mod p^mu(g)), so the result depends
    only on the coset K g.
    """
    m = mu(g)
    if m == 0:
        raise InKError(f"{g} lies in SL2(Z_{g.prime}); the point is undefined")
    p = g.prime
    z = act_boundary(cartan(g).k2.inverse(), BoundaryPoint(*REPELLING_END_OF_CHAMBER, p))
    if z.x == 1:
        return BoundaryPoint(1, residue(z.y, p, m), p)
    return BoundaryPoint(residue(z.x, p, m), 1, p)


class FixedEnds(NamedTuple):
    plus: BoundaryPoint
    minus: BoundaryPoint


def _eigenline(g: MatSL2, root: Fraction):
    if g.b != 0:
        return (g.b, root - g.a)
    return (root - g.d, g.c)


def fixed_ends(g: MatSL2, precision: int) -> FixedEnds:
    """Attracting and repelling ends of a hyperbolic g.

    Each returned point agrees with the true eigenline to Gromov product at
    least ``precision`` (exactly when g is diagonal).
    """
    if precision < 1:
        raise ValueError("precision must be positive")
    p = g.prime
    if not is_hyperbolic(g):
        raise NotHyperbolic(f"{g} is elliptic over Q_{p}")
    if g.b == 0 and g.c == 0:
        e1, e2 = BoundaryPoint(1, 0, p), BoundaryPoint(0, 1, p)
        return FixedEnds(e1, e2) if val(g.a, p) < 0 else FixedEnds(e2, e1)
    v = val(g.trace, p)
    coeff = g.b if g.b != 0 else g.c
    work = precision + abs(v) + 2
    while True:
        alpha, beta = hensel_split(g.trace, p, work)
        ends = []
        ok = True
        for root, approx in ((alpha.to_fraction(), alpha), (beta.to_fraction(), beta)):
            x, y = _eigenline(g, root)
            lowest = min(val(x, p), val(y, p))
            # error in the eigenline is coeff * (root - true root)
            accuracy = val(coeff, p) + approx.valuation + approx.precision - 2 * lowest
            if accuracy < precision:
                ok = False
            ends.append(BoundaryPoint(x, y, p))
        if ok:
            return FixedEnds(*ends)
        work *= 2


__all__ = [
    "MatSL2",
    "identity",
    "diag",
    "upper",
    "lower",
    "weyl",
    "mu",
    "lam",
    "is_hyperbolic",
    "CartanTriple",
    "cartan",
    "BTVertex",
    "base_vertex",
    "lattice_class",
    "act_vertex",
    "vertex_dist",
    "BoundaryPoint",
    "act_boundary",
    "BoundaryDistance",
    "gromov_product",
    "boundary_dist",
    "ray_vertex",
    "zeta_minus",
    "FixedEnds",
    "fixed_ends",
]

"""Smith normal form of small matrices over the local ring Z_(p).

Used as an independent check on closed-form Cartan projections and lattice
distances: the elementary divisors come out of plain pivoting, with no use
of the SL2 structure.
"""

from __future__ import annotations

from fractions import Fraction

from .padic import INF, val


def smith_valuations(rows, p):
    """Valuations of the elementary divisors of a rational matrix over Z_(p).

    ``rows`` is a list of equal-length lists of Fractions. Returns the sorted
    list of diagonal valuations (``inf`` for zero divisors).
    """
    a = [[Fraction(x) for x in row] for row in rows]
    nrows, ncols = len(a), len(a[0])
    out = []
    for k in range(min(nrows, ncols)):
        best = None
        for i in range(k, nrows):
            for j in range(k, ncols):
                if a[i][j] != 0:
                    v = val(a[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            out.extend([INF] * (min(nrows, ncols) - k))
            break
        v, i, j = best
        a[k], a[i] = a[i], a[k]
        for row in a:
            row[k], row[j] = row[j], row[k]
        pivot = a[k][k]
        for i in range(k + 1, nrows):
            factor = a[i][k] / pivot
            if factor:
                a[i] = [x - factor * y for x, y in zip(a[i], a[k])]
        for j in range(k + 1, ncols):
            factor = a[k][j] / pivot
            if factor:
                for row in a:
                    row[j] -= factor * row[k]
        out.append(v)
    return sorted(out)


def elementary_divisor_gap(rows, p):
    """|a - b| for the two elementary divisors p^a, p^b of an invertible 2x2 matrix."""
    lo, hi = smith_valuations(rows, p)
    return hi - lo

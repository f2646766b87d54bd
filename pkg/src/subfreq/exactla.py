"""Small exact linear algebra helpers over the rationals."""

from fractions import Fraction
from math import gcd, lcm


def to_fraction(x):
    """Convert ints, Fractions, "p/q" strings, and floats to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 12) if not x.is_integer() else Fraction(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def rref(rows):
    """Reduced row echelon form. Returns (new_rows, pivot_columns).

    Pivoting is deterministic: first nonzero entry scanning columns left to
    right, rows top to bottom.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        pv = rows[rank][col]
        rows[rank] = [x / pv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rows, pivots


def rank(rows):
    return len(rref(rows)[1])


def kernel_basis(rows, ncols):
    """Basis of the null space of the matrix, as integer-cleared vectors.

    One basis vector per free column, in increasing column order; each vector
    has entry +denominator-cleared 1-slot at its free column.
    """
    reduced, pivots = rref(rows)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -reduced[r][fc]
        basis.append(clear_denominators(vec))
    return basis


def clear_denominators(vec):
    """Scale a rational vector to coprime integers with positive leading sign."""
    denoms = [x.denominator for x in vec if x != 0]
    if not denoms:
        return [Fraction(0)] * len(vec)
    mult = lcm(*denoms) if len(denoms) > 1 else denoms[0]
    ints = [x * mult for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, int(x))
    if g > 1:
        ints = [x / g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def det(rows):
    """Exact determinant by fraction Gaussian elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    sign = Fraction(1)
    result = Fraction(1)
    for col in range(n):
        pivot_row = None
        for i in range(col, n):
            if a[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            sign = -sign
        pv = a[col][col]
        result *= pv
        for i in range(col + 1, n):
            if a[i][col] != 0:
                f = a[i][col] / pv
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return sign * result

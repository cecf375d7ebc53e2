#!/usr/bin/env python
# twounitary/intlinalg.py

"""
    Copyright (C) 2023-2026 the twounitary authors.

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.

Exact linear algebra over the rationals for integer matrices.

Rank uses Bareiss fraction-free elimination: every intermediate entry is a
minor of the input, so each division is exact and Python ints never round.
"""

from fractions import Fraction
from functools import reduce
import logging
from math import gcd
from typing import List, Optional, Sequence, Tuple

log = logging.getLogger(__name__)

IntMatrix = List[List[int]]


def _copy(rows: Sequence[Sequence[int]], ncols: Optional[int]) \
        -> Tuple[IntMatrix, int]:
    m = [[int(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    for r, row in enumerate(m):
        if len(row) != ncols:
            raise ValueError("Row {} has {} entries, expected {}".format(
                r, len(row), ncols))
    return m, ncols


def echelon(rows: Sequence[Sequence[int]],
            ncols: Optional[int] = None) -> Tuple[IntMatrix, List[int]]:
    """
    Fraction-free row echelon form. Returns (nonzero echelon rows, pivot
    columns).
    """
    m, n = _copy(rows, ncols)
    nrows = len(m)
    prev = 1
    r = 0
    pivots = []
    for c in range(n):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        pivot_row = m[r]
        pv = pivot_row[c]
        for i in range(r + 1, nrows):
            row = m[i]
            f = row[c]
            for j in range(c + 1, n):
                q, rem = divmod(pv * row[j] - f * pivot_row[j], prev)
                if rem:
                    raise ArithmeticError("inexact Bareiss division")
                row[j] = q
            row[c] = 0
        prev = pv
        pivots.append(c)
        r += 1
    return m[:r], pivots


def exact_rank(rows: Sequence[Sequence[int]],
               ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    _, pivots = echelon(rows, ncols)
    return len(pivots)


def primitive(vector: Sequence[Fraction]) -> List[int]:
    """Scale a rational vector to integers with gcd 1, first nonzero > 0."""
    den = reduce(lambda a, b: a * b // gcd(a, b),
                 (Fraction(x).denominator for x in vector), 1)
    ints = [int(Fraction(x) * den) for x in vector]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def nullspace_basis(rows: Sequence[Sequence[int]],
                    ncols: int) -> List[List[int]]:
    """
    Basis of {x : A x = 0} over Q, one primitive integer vector per free
    column, in free-column order.
    """
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    ech, pivots = echelon(rows, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            row = ech[r]
            s = sum((row[j] * x[j] for j in range(c + 1, ncols) if row[j]),
                    Fraction(0))
            x[c] = -s / row[c]
        basis.append(primitive(x))
    log.debug("Nullspace: {} columns, rank {}, nullity {}".format(
        ncols, len(pivots), len(basis)))
    return basis


def solve_in_span(basis: Sequence[Sequence[int]],
                  vector: Sequence[int]) -> Optional[List[Fraction]]:
    """
    Coefficients c with sum_b c_b basis_b == vector, or None if the vector
    is outside the span. Basis vectors must be independent.
    """
    n = len(vector)
    # columns are the basis vectors followed by -vector
    rows = [[b[i] for b in basis] + [-int(vector[i])] for i in range(n)]
    kernel = nullspace_basis(rows, len(basis) + 1)
    for k in kernel:
        if k[-1] != 0:
            return [Fraction(x, k[-1]) for x in k[:-1]]
    return None

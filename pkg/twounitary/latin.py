#!/usr/bin/env python
# twounitary/latin.py

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

Latin squares, orthogonal (diagonal) pairs, and the permutation gates and
AME states built from them. Symbols and cells are 1-based throughout.
"""

import cmath
import logging
from math import gcd
from typing import (Dict, Iterable, List, Mapping, NamedTuple, Optional,
                    Sequence, Tuple, Union)

import numpy as np

from twounitary.tensorcore import (
    BipartiteOperator,
    StateVector,
    cell_index,
    flat_index,
    vectorize,
)

log = logging.getLogger(__name__)

Cell = Tuple[int, int]


class NotLatinError(ValueError):
    pass


class NotOrthogonalError(ValueError):
    pass


class NotDiagonalError(ValueError):
    pass


class UnsupportedOrderError(ValueError):
    pass


class PhaseError(ValueError):
    pass


# =============================================================================
# LatinSquare
# =============================================================================

class LatinViolation(NamedTuple):
    kind: str  # 'row' or 'col'
    index: int
    symbol: int


class LatinSquare(object):
    """
    d x d array over [d]. Construction checks the symbol range only; use
    validate_latin() / is_latin() for the Latin property.
    """

    def __init__(self, cells: Union[np.ndarray, Sequence[Sequence[int]]]) \
            -> None:
        c = np.array(cells, dtype=int)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
            raise ValueError("Need a square array, got shape {}".format(
                c.shape))
        d = c.shape[0]
        bad = (c < 1) | (c > d)
        if bad.any():
            r, s = np.argwhere(bad)[0]
            raise NotLatinError(
                "Symbol {} at cell ({}, {}) outside [1, {}]".format(
                    c[r, s], r + 1, s + 1, d))
        c.setflags(write=False)
        self.d = d
        self.cells = c

    def __getitem__(self, cell: Cell) -> int:
        i, j = cell
        return int(self.cells[i - 1, j - 1])

    def main_diagonal(self) -> List[int]:
        return [self[i, i] for i in range(1, self.d + 1)]

    def back_diagonal(self) -> List[int]:
        d = self.d
        return [self[i, d + 1 - i] for i in range(1, d + 1)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatinSquare):
            return NotImplemented
        return np.array_equal(self.cells, other.cells)

    def __hash__(self) -> int:
        return hash(self.cells.tobytes())

    def __repr__(self) -> str:
        return "LatinSquare({})".format(self.cells.tolist())


def _as_square(square: Union[LatinSquare, np.ndarray,
                             Sequence[Sequence[int]]]) -> LatinSquare:
    if isinstance(square, LatinSquare):
        return square
    return LatinSquare(square)


def validate_latin(square) -> List[LatinViolation]:
    """
    Empty list iff Latin. Each (row or column, symbol) occurring more than
    once is reported once.
    """
    sq = _as_square(square)
    violations = []
    for kind, lines in (('row', sq.cells), ('col', sq.cells.T)):
        for idx, line in enumerate(lines, start=1):
            symbols, counts = np.unique(line, return_counts=True)
            for s in symbols[counts > 1]:
                violations.append(LatinViolation(kind, idx, int(s)))
    return violations


def is_latin(square) -> bool:
    return not validate_latin(square)


def _require_latin(sq: LatinSquare, name: str = "square") -> None:
    violations = validate_latin(sq)
    if violations:
        raise NotLatinError("{} is not Latin: {}".format(name, violations))


def is_diagonal(square) -> bool:
    """Both the main and the back diagonal are transversals."""
    sq = _as_square(square)
    _require_latin(sq)
    return (len(set(sq.main_diagonal())) == sq.d and
            len(set(sq.back_diagonal())) == sq.d)


def are_orthogonal(k, l) -> bool:
    k = _as_square(k)
    l = _as_square(l)
    if k.d != l.d:
        raise ValueError("Orders differ: {} vs {}".format(k.d, l.d))
    _require_latin(k, "K")
    _require_latin(l, "L")
    pairs = set(zip(k.cells.ravel().tolist(), l.cells.ravel().tolist()))
    return len(pairs) == k.d * k.d


def cyclic_square(d: int, slope: int = 1) -> LatinSquare:
    """K_ij = ((i - 1) + slope (j - 1) mod d) + 1."""
    return linear_square(d, 1, slope)


def linear_square(d: int, a: int, b: int) -> LatinSquare:
    """K_ij = (a (i - 1) + b (j - 1) mod d) + 1."""
    i, j = np.indices((d, d))
    return LatinSquare((a * i + b * j) % d + 1)


# =============================================================================
# OlsPair
# =============================================================================

class OlsPair(object):
    def __init__(self, k, l) -> None:
        self.k = _as_square(k)
        self.l = _as_square(l)
        if not are_orthogonal(self.k, self.l):
            raise NotOrthogonalError("K and L are not orthogonal")
        self.d = self.k.d
        self.diagonal_flag = is_diagonal(self.k) and is_diagonal(self.l)

    def pair(self, i: int, j: int) -> Cell:
        return self.k[i, j], self.l[i, j]

    def __repr__(self) -> str:
        return "<OlsPair(d={}, diagonal={})>".format(
            self.d, self.diagonal_flag)


ODLS4_K = [[1, 3, 4, 2],
           [4, 2, 1, 3],
           [2, 4, 3, 1],
           [3, 1, 2, 4]]
ODLS4_L = [[2, 3, 1, 4],
           [4, 1, 3, 2],
           [3, 2, 4, 1],
           [1, 4, 2, 3]]


def odls4() -> OlsPair:
    return OlsPair(ODLS4_K, ODLS4_L)


def _linear_odls(d: int) -> OlsPair:
    # slopes (1, 2) and (1, 3): a + b, a - b and the slope determinant are
    # units whenever gcd(d, 6) == 1
    return OlsPair(linear_square(d, 1, 2), linear_square(d, 1, 3))


def _product_square(a: LatinSquare, b: LatinSquare) -> LatinSquare:
    """Direct product: cell ((i1, i2), (j1, j2)) holds (a_i1j1, b_i2j2)."""
    db = b.d
    cells = ((a.cells[:, None, :, None] - 1) * db +
             b.cells[None, :, None, :])
    return LatinSquare(cells.reshape(a.d * db, a.d * db))


def _odls_factors(d: int) -> Optional[List[int]]:
    """Factorize d into supported base orders, or None."""
    if d == 4 or (d % 2 == 1 and d % 3 != 0 and d > 1):
        return [d]
    for f in range(4, int(d ** 0.5) + 1):
        if d % f == 0:
            left = _odls_factors(f)
            right = _odls_factors(d // f)
            if left and right:
                return left + right
    return None


def construct_odls(d: int) -> OlsPair:
    """
    d = 4 is the embedded pair; d coprime to 6 uses linear squares; products
    of supported orders use the direct product, which keeps both diagonals
    transversal.
    """
    if d in (2, 3, 6):
        raise UnsupportedOrderError(
            "No orthogonal diagonal Latin squares of order {}".format(d))
    factors = _odls_factors(d)
    if factors is None:
        raise UnsupportedOrderError(
            "No ODLS construction implemented for order {} (one exists, but "
            "only 4, orders coprime to 6 and their products are built)".format(
                d))
    pairs = [odls4() if f == 4 else _linear_odls(f) for f in factors]
    k, l = pairs[0].k, pairs[0].l
    for p in pairs[1:]:
        k = _product_square(k, p.k)
        l = _product_square(l, p.l)
    result = OlsPair(k, l)
    if not result.diagonal_flag:
        raise NotDiagonalError("construction lost diagonality at d={}".format(
            d))
    log.debug("Constructed ODLS of order {} from factors {}".format(
        d, factors))
    return result


def construct_ols(d: int) -> OlsPair:
    """Any orthogonal pair; linear squares for odd d, ODLS otherwise."""
    if d % 2 == 1 and d > 1:
        for a in range(1, d):
            if gcd(a, d) == 1 and gcd(a - 1, d) == 1:
                return OlsPair(linear_square(d, 1, 1), linear_square(d, 1, a))
    return construct_odls(d)


# =============================================================================
# Permutation gates
# =============================================================================

class PermutationGate(object):
    """
    0/1 permutation operator; row_map sends each row cell (i, j) to the
    column cell (k, l) holding its unit entry.
    """

    def __init__(self, d: int, row_map: Mapping[Cell, Cell]) -> None:
        cells = [(i, j) for i in range(1, d + 1) for j in range(1, d + 1)]
        if sorted(row_map.keys()) != cells:
            raise ValueError("row_map must cover every row cell of d={}".format(
                d))
        if sorted(row_map.values()) != cells:
            raise ValueError("row_map is not a bijection")
        self.d = d
        self.row_map = dict(row_map)
        self.operator = BipartiteOperator.from_entries(
            d, ((i, j, k, l, 1.0) for (i, j), (k, l) in self.row_map.items()))

    @classmethod
    def from_column_images(cls, d: int,
                           images: Sequence[Cell]) -> "PermutationGate":
        """
        P = sum_x |pi(x)><x| with images[x] = pi(x), x in lexicographic
        order: column x holds its unit entry in row pi(x).
        """
        cols = [cell_index(d, n) for n in range(1, d * d + 1)]
        return cls(d, {img: col for col, img in zip(cols, images)})

    @classmethod
    def from_row_images(cls, d: int,
                        images: Sequence[Cell]) -> "PermutationGate":
        """Row x (lexicographic) holds its unit entry in column images[x]."""
        rows = [cell_index(d, n) for n in range(1, d * d + 1)]
        return cls(d, dict(zip(rows, images)))

    def action(self, cell: Cell) -> Cell:
        """pi(x): the row holding the unit entry of column x."""
        for row, col in self.row_map.items():
            if col == cell:
                return row
        raise KeyError(cell)

    def __repr__(self) -> str:
        return "<PermutationGate(d={})>".format(self.d)


def _images_from_codes(codes: Iterable[int]) -> List[Cell]:
    return [divmod(c, 10) for c in codes]


def gate_from_ols(k, l=None) -> PermutationGate:
    """P = sum_ij |ij><K_ij L_ij|. Accepts an OlsPair or two squares."""
    pair = k if isinstance(k, OlsPair) else OlsPair(k, l)
    d = pair.d
    return PermutationGate(d, {
        (i, j): pair.pair(i, j)
        for i in range(1, d + 1) for j in range(1, d + 1)
    })


def pair_from_gate(p: Union[PermutationGate, BipartiteOperator]) -> OlsPair:
    """Read K, L off a permutation gate's support (inverse of gate_from_ols)."""
    if isinstance(p, BipartiteOperator):
        p = gate_from_operator(p)
    d = p.d
    k = np.zeros((d, d), dtype=int)
    l = np.zeros((d, d), dtype=int)
    for (i, j), (kk, ll) in p.row_map.items():
        k[i - 1, j - 1] = kk
        l[i - 1, j - 1] = ll
    return OlsPair(k, l)


def gate_from_operator(op: BipartiteOperator,
                       tol: float = 1e-12) -> PermutationGate:
    m = np.abs(op.matrix)
    if not (np.all((np.abs(m - 1) < tol) | (m < tol)) and
            np.all(np.sum(m > 0.5, axis=0) == 1) and
            np.all(np.sum(m > 0.5, axis=1) == 1)):
        raise ValueError("Operator is not a (phased) permutation")
    d = op.d
    cols = np.argmax(m, axis=1)
    return PermutationGate(d, {
        cell_index(d, r + 1): cell_index(d, int(c) + 1)
        for r, c in enumerate(cols)
    })


def is_permutation_operator(op: BipartiteOperator,
                            tol: float = 1e-12) -> bool:
    try:
        gate_from_operator(op, tol)
    except ValueError:
        return False
    return True


# =============================================================================
# Enphasing
# =============================================================================

def enphase(p: PermutationGate,
            phases: Mapping[Cell, complex],
            tol: float = 1e-12) -> BipartiteOperator:
    """
    Multiply each unit entry by the phase keyed by its row cell (i, j).
    Cells not mentioned keep phase 1.
    """
    d = p.d
    m = np.array(p.operator.matrix)
    for cell, phase in phases.items():
        if cell not in p.row_map:
            raise PhaseError("Cell {} is not a support row of d={}".format(
                cell, d))
        if abs(abs(phase) - 1) > tol:
            raise PhaseError("Phase {} at {} is not unimodular".format(
                phase, cell))
        k, l = p.row_map[cell]
        m[flat_index(d, *cell) - 1, flat_index(d, k, l) - 1] = phase
    return BipartiteOperator(m)


def random_phases(p: PermutationGate,
                  rng: np.random.Generator) -> Dict[Cell, complex]:
    return {cell: cmath.exp(2j * cmath.pi * rng.random())
            for cell in sorted(p.row_map)}


def ame_from_ols(k, l=None) -> StateVector:
    """(1/d) sum_ij |i j K_ij L_ij>."""
    return vectorize(gate_from_ols(k, l).operator)


# =============================================================================
# Named gates
# =============================================================================

P16_IMAGES = (11, 44, 22, 33, 43, 12, 34, 21, 24, 31, 13, 42, 32, 23, 41, 14)


def p16() -> PermutationGate:
    """Row ij (lexicographic) -> column kl as listed in P16_IMAGES."""
    return PermutationGate.from_row_images(4, _images_from_codes(P16_IMAGES))


def p16_theta(theta: float) -> BipartiteOperator:
    """P16 with its (11, 11) entry replaced by exp(i theta)."""
    return enphase(p16(), {(1, 1): cmath.exp(1j * theta)})

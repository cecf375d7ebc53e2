#!/usr/bin/env python
# twounitary/golden.py

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

The golden AME(4,6) operator U36, its theta family, and the homogeneous
phase system whose kernel parametrizes 2-unitary enphasings.

U36 is read from a transcription file (token format)::

    d 6
    # i j k l omega_exponent magnitude_tag
    1 1 1 1 0 a
    1 1 1 6 17 b

magnitude tags are products of the letters a, b, c (e.g. "ab"); the entry is
omega^exponent * magnitude with omega = exp(2 pi i / 20). Plain sparse
format lines ("i j k l re im") are accepted too. The 2-unitarity deficit
doubles as a transcription checksum.
"""

import cmath
from concurrent.futures import ThreadPoolExecutor
import logging
import math
import os
import re
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from twounitary import intlinalg
from twounitary.constants import (
    SUPPORT_TOLERANCE,
    U36_CHECKSUM_TOLERANCE,
    U36_FILE_ENV_VAR,
    U36_NNZ,
)
from twounitary.matrixio import (
    MatrixFormatError,
    iter_lines,
    parse_float,
    parse_header,
    parse_index_quadruple,
    parse_int,
)
from twounitary.settings import get_u36_path
from twounitary.tensorcore import (
    BipartiteOperator,
    MatrixLike,
    as_operator,
    classify,
)

log = logging.getLogger(__name__)

TAG_REGEX = re.compile(r"^([abc]+|1)$")


class GoldenDataError(ValueError):
    pass


# =============================================================================
# Constants
# =============================================================================

class GoldenConstants(object):
    phi = (1 + math.sqrt(5)) / 2
    a = (5 + math.sqrt(5)) ** -0.5
    b = a * phi
    c = 1 / math.sqrt(2)
    omega = cmath.exp(2j * math.pi / 20)

    @classmethod
    def magnitude(cls, tag: str) -> float:
        if not TAG_REGEX.match(tag):
            raise ValueError("Bad magnitude tag {!r}".format(tag))
        value = 1.0
        for letter in tag.replace('1', ''):
            value *= getattr(cls, letter)
        return value

    @classmethod
    def omega_power(cls, exponent: int) -> complex:
        return cmath.exp(2j * math.pi * (exponent % 20) / 20)

    @classmethod
    def c0(cls) -> float:
        """Theta-independent part of the n = 4 invariant of U36(theta)."""
        return 3 * (202 + math.sqrt(5) +
                    2 * math.sqrt(5 - 2 * math.sqrt(5))) / 4

    @classmethod
    def u36_invariant(cls, theta: float) -> float:
        return cls.c0() + 6 * math.cos(theta)


# =============================================================================
# Loading U36
# =============================================================================

def loads_u36(text: str, filename: str = "<string>") -> BipartiteOperator:
    lines = list(iter_lines(text))
    d, start = parse_header(lines, filename)
    entries = []
    seen = set()
    for lineno, tokens in lines[start:]:
        if not tokens:
            continue
        if len(tokens) != 6:
            raise MatrixFormatError(
                "expected 'i j k l omega_exponent tag' or 'i j k l re im'",
                filename, lineno, tokens[0][0])
        quad = parse_index_quadruple(tokens, d, filename, lineno)
        if quad in seen:
            raise MatrixFormatError("entry {} repeated".format(quad),
                                    filename, lineno, tokens[0][0])
        seen.add(quad)
        last = tokens[5][1]
        if TAG_REGEX.match(last):
            exponent = parse_int(tokens[4], filename, lineno)
            value = (GoldenConstants.omega_power(exponent) *
                     GoldenConstants.magnitude(last))
        else:
            value = complex(parse_float(tokens[4], filename, lineno),
                            parse_float(tokens[5], filename, lineno))
        entries.append(quad + (value,))
    return BipartiteOperator.from_entries(d, entries)


def u36_available(source: Optional[str] = None) -> bool:
    filename = source or get_u36_path()
    return bool(filename) and os.path.isfile(filename)


def check_u36(op: BipartiteOperator,
              tol: float = U36_CHECKSUM_TOLERANCE) -> None:
    if op.d != 6:
        raise GoldenDataError("U36 must have d=6, got d={}".format(op.d))
    if op.nnz != U36_NNZ:
        raise GoldenDataError("U36 must have {} nonzeros, found {}".format(
            U36_NNZ, op.nnz))
    report = classify(op, tol)
    if not report.is_two_unitary:
        m = op.matrix
        row_err = np.linalg.norm(m @ m.conj().T - np.eye(36), axis=1)
        worst = np.argsort(row_err)[::-1][:3]
        raise GoldenDataError(
            "U36 transcription fails the 2-unitarity checksum (deficits "
            "{:.3g}, {:.3g}, {:.3g}); most suspect rows (1-based flat): "
            "{}".format(report.deficit_u, report.deficit_r, report.deficit_g,
                        [int(r) + 1 for r in worst]))


def load_u36(source: Optional[str] = None,
             check: bool = True) -> BipartiteOperator:
    filename = source or get_u36_path()
    if not filename:
        raise GoldenDataError(
            "No U36 transcription given; pass --u36-file or set {}".format(
                U36_FILE_ENV_VAR))
    if not os.path.isfile(filename):
        raise GoldenDataError(
            "No U36 transcription at {!r}; point {} at one".format(
                filename, U36_FILE_ENV_VAR))
    with open(filename, encoding='utf-8') as f:
        op = loads_u36(f.read(), filename)
    if check:
        check_u36(op)
    log.info("Loaded U36 from {}".format(filename))
    return op


# =============================================================================
# One-parameter family
# =============================================================================

def _phase_diagonal(theta: float, positions: Sequence[int],
                    n: int = 36) -> np.ndarray:
    diag = np.ones(n, dtype=complex)
    diag[[p - 1 for p in positions]] = cmath.exp(1j * theta)
    return np.diag(diag)


D_THETA_ROWS = (1, 4, 7, 10)
D_PRIME_COLS = (1, 2, 19, 20)
D_DOUBLE_PRIME_ROWS = (1, 2, 7, 8)


def d_theta(theta: float) -> np.ndarray:
    return _phase_diagonal(theta, D_THETA_ROWS)


def d_prime(theta: float) -> np.ndarray:
    """[U36(theta)]^R = U36^R d_prime(theta)."""
    return _phase_diagonal(theta, D_PRIME_COLS)


def d_double_prime(theta: float) -> np.ndarray:
    """[U36(theta)]^Gamma = d_double_prime(theta) U36^Gamma."""
    return _phase_diagonal(theta, D_DOUBLE_PRIME_ROWS)


def u36_theta(theta: float,
              u36: Optional[BipartiteOperator] = None) -> BipartiteOperator:
    u = u36 if u36 is not None else load_u36()
    return BipartiteOperator(d_theta(theta) @ u.matrix)


# =============================================================================
# Phase system
# =============================================================================

class Provenance(NamedTuple):
    frame: str  # 'U', 'R' or 'G'
    row_a: int  # 1-based flat rows of that frame
    row_b: int


class PhaseSystem(object):
    """
    One unknown phase per support entry (variables: 0-based (row, col) of
    the original operator, row-major). Each row of the integer matrix is a
    difference equation theta(a, c1) - theta(b, c1) - theta(a, c) +
    theta(b, c) = 0 in some rearrangement frame.
    """

    FRAMES = ('U', 'G', 'R')

    def __init__(self, d: int, variables: List[Tuple[int, int]],
                 rows: List[List[int]],
                 provenance: List[Provenance]) -> None:
        self.d = d
        self.variables = variables
        self.rows = rows
        self.provenance = provenance

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def counts(self) -> Dict[str, int]:
        out = {f: 0 for f in self.FRAMES}
        for p in self.provenance:
            out[p.frame] += 1
        return out

    def __repr__(self) -> str:
        return "<PhaseSystem(d={}, vars={}, rows={}, counts={})>".format(
            self.d, self.nvars, self.nrows, self.counts())


def _frame_positions(d: int, r: int, c: int) -> Dict[str, Tuple[int, int]]:
    i, a = divmod(r, d)
    j, b = divmod(c, d)
    return {
        'U': (r, c),
        'R': (i * d + j, a * d + b),
        'G': (i * d + b, j * d + a),
    }


def _frame_equations(frame: str, nvars: int,
                     layout: Dict[int, Dict[int, int]]) \
        -> Tuple[List[List[int]], List[Provenance]]:
    rows = []
    provenance = []
    keys = sorted(layout)
    for x, ra in enumerate(keys):
        cols_a = layout[ra]
        for rb in keys[x + 1:]:
            cols_b = layout[rb]
            shared = sorted(set(cols_a) & set(cols_b))
            if len(shared) < 2:
                continue
            c1 = shared[0]
            for c in shared[1:]:
                row = [0] * nvars
                row[cols_a[c1]] += 1
                row[cols_b[c1]] -= 1
                row[cols_a[c]] -= 1
                row[cols_b[c]] += 1
                rows.append(row)
                provenance.append(Provenance(frame, ra + 1, rb + 1))
    return rows, provenance


def build_phase_system(u: MatrixLike,
                       tol: float = SUPPORT_TOLERANCE,
                       workers: int = 1) -> PhaseSystem:
    op = as_operator(u)
    d = op.d
    support_rows, support_cols = np.nonzero(np.abs(op.matrix) > tol)
    variables = list(zip(support_rows.tolist(), support_cols.tolist()))
    layouts = {f: {} for f in PhaseSystem.FRAMES}
    for v, (r, c) in enumerate(variables):
        for frame, (fr, fc) in _frame_positions(d, r, c).items():
            layouts[frame].setdefault(fr, {})[fc] = v
    with ThreadPoolExecutor(max_workers=workers) as executor:
        parts = list(executor.map(
            lambda f: _frame_equations(f, len(variables), layouts[f]),
            PhaseSystem.FRAMES))
    rows = []
    provenance = []
    for r, p in parts:
        rows += r
        provenance += p
    system = PhaseSystem(d, variables, rows, provenance)
    log.debug("Built {!r}".format(system))
    return system


def exact_rank(system: PhaseSystem) -> int:
    return intlinalg.exact_rank(system.rows, system.nvars)


def nullspace_basis(system: PhaseSystem) -> List[List[int]]:
    return intlinalg.nullspace_basis(system.rows, system.nvars)


def enphase_solution(u: MatrixLike, coeffs: Sequence[float],
                     basis: Optional[Sequence[Sequence[int]]] = None,
                     tol: float = SUPPORT_TOLERANCE) -> BipartiteOperator:
    """Multiply support entry v by exp(i sum_b coeffs[b] basis[b][v])."""
    op = as_operator(u)
    system = build_phase_system(op, tol)
    if basis is None:
        basis = nullspace_basis(system)
    if len(coeffs) != len(basis):
        raise ValueError("Need {} coefficients, got {}".format(
            len(basis), len(coeffs)))
    if basis and len(basis[0]) != system.nvars:
        raise ValueError("Basis vectors have {} entries, operator has {} "
                         "support entries".format(len(basis[0]),
                                                  system.nvars))
    thetas = np.zeros(system.nvars)
    for c, b in zip(coeffs, basis):
        thetas += c * np.asarray(b, dtype=float)
    m = np.array(op.matrix)
    for (r, col), t in zip(system.variables, thetas):
        m[r, col] *= cmath.exp(1j * t)
    return BipartiteOperator(m)


def theta_direction(system: PhaseSystem,
                    rows: Sequence[int] = D_THETA_ROWS) -> List[int]:
    """Phase vector of left multiplication by d_theta: 1 on those rows."""
    wanted = {r - 1 for r in rows}
    return [int(r in wanted) for r, _ in system.variables]


def in_span(basis: Sequence[Sequence[int]], vector: Sequence[int]) \
        -> Tuple[bool, Optional[List[Fraction]]]:
    coeffs = intlinalg.solve_in_span(basis, vector)
    return coeffs is not None, coeffs

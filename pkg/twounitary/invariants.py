#!/usr/bin/env python
# twounitary/invariants.py

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

Local-unitary invariants of bipartite operators.

For permutations sigma, tau, rho, lambda of [n], the invariant of A is

    sum  prod_m A[(i_m j_m), (k_m l_m)]
       * prod_m conj(A[(i_sigma(m) j_tau(m)), (k_rho(m) l_lambda(m))])

summed over all index vectors. Every index label occurs once unconjugated
and once conjugated, so local unitaries cancel pairwise.
"""

from concurrent.futures import ThreadPoolExecutor
import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import opt_einsum

from twounitary.constants import CONTRACTION_BUDGET, CONTRACTION_CHUNK_TERMS
from twounitary.constants import DENSE_CHUNK_TERMS
from twounitary.intlinalg import exact_rank, nullspace_basis
from twounitary.latin import (
    NotDiagonalError,
    OlsPair,
    PermutationGate,
    gate_from_operator,
)
from twounitary.settings import get_num_threads
from twounitary.tensorcore import (
    BipartiteOperator,
    MatrixLike,
    as_operator,
    partial_transpose,
    realign,
)

log = logging.getLogger(__name__)

Quad = Tuple[int, int, int, int]

METHODS = ('auto', 'sparse', 'dense', 'network')


class ContractionBudgetError(ValueError):
    pass


# =============================================================================
# PermTuple
# =============================================================================

def _check_perm(p: Sequence[int], n: int, name: str) -> Tuple[int, ...]:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError("{} = {} is not a permutation of [{}]".format(
            name, p, n))
    return p


class PermTuple(object):
    """Four permutations of [n] in one-line notation, 1-based."""

    NAMES = ('sigma', 'tau', 'rho', 'lambda')

    def __init__(self, sigma: Sequence[int], tau: Sequence[int],
                 rho: Sequence[int], lam: Sequence[int]) -> None:
        n = len(sigma)
        if n < 1:
            raise ValueError("Permutations must have length >= 1")
        self.n = n
        self.rows = tuple(
            _check_perm(p, n, name)
            for p, name in zip((sigma, tau, rho, lam), self.NAMES))
        self.sigma, self.tau, self.rho, self.lam = self.rows

    @classmethod
    def identity(cls, n: int) -> "PermTuple":
        ident = list(range(1, n + 1))
        return cls(ident, ident, ident, ident)

    @property
    def images0(self) -> np.ndarray:
        """4 x n array of 0-based images."""
        return np.array(self.rows, dtype=int) - 1

    @property
    def latin_rectangle(self) -> bool:
        return all(len(set(col)) == 4 for col in zip(*self.rows))

    def inverse(self) -> "PermTuple":
        inv = []
        for p in self.rows:
            q = [0] * self.n
            for m, image in enumerate(p, start=1):
                q[image - 1] = m
            inv.append(q)
        return PermTuple(*inv)

    def compose_right(self, pi: Sequence[int]) -> "PermTuple":
        """Each row p becomes p o pi (reorders the conjugated factors)."""
        return PermTuple(*[[p[x - 1] for x in pi] for p in self.rows])

    def with_identity_row(self, which: str) -> "PermTuple":
        """
        Equivalent tuple (same invariant) in which row `which` is the
        identity.
        """
        row = self.rows[self.NAMES.index(which)]
        inv = [0] * self.n
        for m, image in enumerate(row, start=1):
            inv[image - 1] = m
        return self.compose_right(inv)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermTuple):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return "PermTuple(sigma={}, tau={}, rho={}, lambda={})".format(
            *self.rows)


def canonical_n4_tuple(identity_row: Optional[str] = None) -> PermTuple:
    t = PermTuple((1, 2, 3, 4), (2, 1, 4, 3), (3, 4, 1, 2), (4, 3, 2, 1))
    if identity_row:
        t = t.with_identity_row(identity_row)
    return t


def latin_rectangle_check(perms: PermTuple) -> bool:
    return perms.latin_rectangle


# =============================================================================
# Contraction
# =============================================================================

def contract_invariant(a: MatrixLike, perms: PermTuple,
                       method: str = 'auto',
                       budget: int = CONTRACTION_BUDGET,
                       workers: Optional[int] = None,
                       chunk_terms: int = CONTRACTION_CHUNK_TERMS) -> complex:
    """
    Methods: 'sparse' enumerates n-tuples over the nonzero support; 'dense'
    loops over every index vector (small d and n only); 'network' hands the
    2n-tensor network to opt_einsum; 'auto' picks sparse unless the support
    enumeration exceeds the budget.
    """
    op = as_operator(a)
    if method not in METHODS:
        raise ValueError("Unknown method {!r}; use one of {}".format(
            method, METHODS))
    if method == 'auto':
        method = 'sparse' if op.nnz ** perms.n <= budget else 'network'
    log.debug("Contracting d={} n={} nnz={} via {}".format(
        op.d, perms.n, op.nnz, method))
    if method == 'sparse':
        if op.nnz ** perms.n > budget:
            raise ContractionBudgetError(
                "{}^{} support tuples exceed budget {}".format(
                    op.nnz, perms.n, budget))
        return _contract_sparse(op, perms, workers, chunk_terms)
    if method == 'dense':
        return _contract_dense(op, perms, budget)
    return _contract_network(op, perms)


def _contract_sparse(op: BipartiteOperator, perms: PermTuple,
                     workers: Optional[int], chunk_terms: int) -> complex:
    d = op.d
    n = perms.n
    rows, cols = np.nonzero(op.matrix)
    nnz = len(rows)
    if nnz == 0:
        return 0j
    vals = op.matrix[rows, cols]
    si, sj = np.divmod(rows, d)
    sk, sl = np.divmod(cols, d)
    conj_table = op.matrix.conj().reshape(-1)
    images = perms.images0
    tail = nnz ** (n - 1)
    per_chunk = max(1, chunk_terms // tail)
    tail_axes = [
        np.arange(nnz).reshape((1,) * m + (nnz,) + (1,) * (n - 1 - m))
        for m in range(1, n)
    ]

    def work(start: int) -> complex:
        stop = min(start + per_chunk, nnz)
        axes = [np.arange(start, stop).reshape((-1,) + (1,) * (n - 1))]
        axes += tail_axes
        prod = vals[axes[0]]
        for ax in axes[1:]:
            prod = prod * vals[ax]
        for m in range(n):
            code = ((si[axes[images[0, m]]] * d +
                     sj[axes[images[1, m]]]) * d +
                    sk[axes[images[2, m]]]) * d + sl[axes[images[3, m]]]
            prod = prod * conj_table[code]
        return complex(prod.sum())

    starts = list(range(0, nnz, per_chunk))
    workers = workers or get_num_threads()
    if workers == 1 or len(starts) == 1:
        partials = [work(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            partials = list(executor.map(work, starts))
    total = 0j
    for p in partials:  # fixed chunk order
        total += p
    return total


def _contract_dense(op: BipartiteOperator, perms: PermTuple,
                    budget: int) -> complex:
    d = op.d
    n = perms.n
    nterms = d ** (4 * n)
    if nterms > budget:
        raise ContractionBudgetError(
            "dense loop needs {} terms, budget {}".format(nterms, budget))
    t = op.tensor
    ct = t.conj()
    images = perms.images0
    shape = (d,) * (4 * n)
    total = 0j
    for start in range(0, nterms, DENSE_CHUNK_TERMS):
        flat = np.arange(start, min(start + DENSE_CHUNK_TERMS, nterms))
        digits = np.unravel_index(flat, shape)
        i, j, k, l = (digits[s * n:(s + 1) * n] for s in range(4))
        prod = np.ones(len(flat), dtype=complex)
        for m in range(n):
            prod *= t[i[m], j[m], k[m], l[m]]
        for m in range(n):
            prod *= ct[i[images[0, m]], j[images[1, m]],
                       k[images[2, m]], l[images[3, m]]]
        total += prod.sum()
    return complex(total)


def _contract_network(op: BipartiteOperator, perms: PermTuple) -> complex:
    n = perms.n
    t = op.tensor
    ct = t.conj()
    images = perms.images0
    operands = []
    for m in range(n):
        operands += [t, [m, n + m, 2 * n + m, 3 * n + m]]
    for m in range(n):
        operands += [ct, [images[0, m], n + images[1, m],
                          2 * n + images[2, m], 3 * n + images[3, m]]]
    operands.append([])
    return complex(opt_einsum.contract(*operands))


# =============================================================================
# L[U] and its moments
# =============================================================================

class LOperator(object):
    """
    L[U] = (S_BD (x) 1)(U^dag (x) U^dag)(S_BD (x) 1)(U (x) U) on parties
    A, B, C, D, flat index nested as |a b c d>.
    """

    def __init__(self, d: int, matrix: np.ndarray) -> None:
        self.d = d
        self.matrix = matrix

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def __repr__(self) -> str:
        return "<LOperator(d={})>".format(self.d)


def build_L(u: MatrixLike) -> LOperator:
    """
    With S the swap, L[SUS] = (S (x) S) L[U] (S (x) S): the two share their
    spectrum and every moment, not their entries.
    """
    op = as_operator(u)
    d = op.d
    n = d ** 4
    uu = np.kron(op.matrix, op.matrix)
    udag = op.matrix.conj().T
    x = np.kron(udag, udag).reshape((d,) * 8)
    sxs = x.transpose(0, 3, 2, 1, 4, 7, 6, 5).reshape(n, n)
    return LOperator(d, sxs @ uu)


def moment(u: MatrixLike, k: int) -> complex:
    """Tr L[U]^k."""
    if k < 1:
        raise ValueError("Moment order must be >= 1, not {}".format(k))
    lmat = build_L(u).matrix
    if k == 1:
        return complex(np.trace(lmat))
    power = np.linalg.matrix_power(lmat, k - 1)
    return complex(np.sum(power * lmat.T))


def rearrangement_moments(u: MatrixLike, k: int) -> Dict[str, complex]:
    op = as_operator(u)
    return {
        'U': moment(op, k),
        'R': moment(realign(op), k),
        'G': moment(partial_transpose(op), k),
    }


# =============================================================================
# Multi-subsets
# =============================================================================

class MultiSubset(object):
    """A multiset of support quadruples (i, j, k, l) of a permutation gate."""

    def __init__(self, d: int, counts: Dict[Quad, int]) -> None:
        if any(c < 0 for c in counts.values()):
            raise ValueError("Negative multiplicity")
        self.d = d
        self.counts = {q: c for q, c in counts.items() if c}

    @classmethod
    def from_elements(cls, d: int, elements: Sequence[Quad]) -> "MultiSubset":
        counts = {}  # type: Dict[Quad, int]
        for q in elements:
            q = tuple(q)
            counts[q] = counts.get(q, 0) + 1
        return cls(d, counts)

    def elements(self) -> List[Quad]:
        """Sorted, with multiplicity."""
        out = []
        for q in sorted(self.counts):
            out.extend([q] * self.counts[q])
        return out

    @property
    def size(self) -> int:
        return sum(self.counts.values())

    def counting_functions(self) -> np.ndarray:
        """4 x d array: row t is p -> sum of counts with component t == p."""
        f = np.zeros((4, self.d), dtype=int)
        for q, c in self.counts.items():
            for t in range(4):
                f[t, q[t] - 1] += c
        return f

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiSubset):
            return NotImplemented
        return self.d == other.d and self.counts == other.counts

    def __repr__(self) -> str:
        return "MultiSubset(d={}, {})".format(self.d, self.elements())


def perms_from_multisets(x: MultiSubset, y: MultiSubset,
                         y_elements: Optional[Sequence[Quad]] = None) \
        -> PermTuple:
    """
    Enumerate X (sorted) as x_1..x_N and Y as y_1..y_N (sorted unless
    given); find sigma, tau, rho, lambda with
    y_m = (i_sigma(m), j_tau(m), k_rho(m), l_lambda(m)) by greedy
    componentwise matching.
    """
    xs = x.elements()
    ys = list(y_elements) if y_elements is not None else y.elements()
    if len(xs) != len(ys):
        raise ValueError("Multisets differ in size: {} vs {}".format(
            len(xs), len(ys)))
    perms = []
    for t in range(4):
        used = set()
        perm = []
        for ym in ys:
            p = next((q for q in range(len(xs))
                      if q not in used and xs[q][t] == ym[t]), None)
            if p is None:
                raise ValueError(
                    "Counting functions differ in component {}".format(t))
            used.add(p)
            perm.append(p + 1)
        perms.append(perm)
    return PermTuple(*perms)


class OdlsMultisets(NamedTuple):
    x: MultiSubset
    y: MultiSubset
    perms: PermTuple

    @property
    def sigma(self) -> Tuple[int, ...]:
        return self.perms.sigma

    @property
    def tau(self) -> Tuple[int, ...]:
        return self.perms.tau

    @property
    def rho(self) -> Tuple[int, ...]:
        return self.perms.rho

    @property
    def lam(self) -> Tuple[int, ...]:
        return self.perms.lam


def multisets_from_odls(pair: OlsPair) -> OdlsMultisets:
    """X: main-diagonal quadruples; Y: back-diagonal quadruples."""
    if not pair.diagonal_flag:
        raise NotDiagonalError("Pair is not an ODLS pair")
    d = pair.d
    x = [(i, i) + pair.pair(i, i) for i in range(1, d + 1)]
    y = [(i, d + 1 - i) + pair.pair(i, d + 1 - i) for i in range(1, d + 1)]
    xm = MultiSubset.from_elements(d, x)
    ym = MultiSubset.from_elements(d, y)
    return OdlsMultisets(xm, ym, perms_from_multisets(xm, ym, y))


def odls_invariant(p_enphased: MatrixLike, pair: OlsPair,
                   **kwargs) -> complex:
    return contract_invariant(p_enphased, multisets_from_odls(pair).perms,
                              **kwargs)


# =============================================================================
# Balanced multi-subsets of a permutation gate
# =============================================================================

def _support_quads(p: PermutationGate) -> List[Quad]:
    return [cell + p.row_map[cell] for cell in sorted(p.row_map)]


def balance_system(p: PermutationGate) -> List[List[int]]:
    """
    4d x d^2 integer matrix: row (t, v) sums the unknowns F(i, j) over
    support quadruples whose component t equals v.
    """
    if isinstance(p, BipartiteOperator):
        p = gate_from_operator(p)
    d = p.d
    quads = _support_quads(p)
    rows = []
    for t in range(4):
        for v in range(1, d + 1):
            rows.append([int(q[t] == v) for q in quads])
    return rows


def balance_rank(p: PermutationGate) -> int:
    if isinstance(p, BipartiteOperator):
        p = gate_from_operator(p)
    return exact_rank(balance_system(p), p.d * p.d)


def balanced_multisets(p: PermutationGate) \
        -> Optional[Tuple[MultiSubset, MultiSubset]]:
    """
    Two distinct multi-subsets of the support with equal counting
    functions, from the positive and negative parts of a kernel vector of
    the balance system. None if the kernel is trivial.
    """
    if isinstance(p, BipartiteOperator):
        p = gate_from_operator(p)
    d = p.d
    kernel = nullspace_basis(balance_system(p), d * d)
    if not kernel:
        return None
    v = kernel[0]
    quads = _support_quads(p)
    x = MultiSubset(d, {q: c for q, c in zip(quads, v) if c > 0})
    y = MultiSubset(d, {q: -c for q, c in zip(quads, v) if c < 0})
    return x, y

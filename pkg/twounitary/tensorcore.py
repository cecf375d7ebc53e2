#!/usr/bin/env python
# twounitary/tensorcore.py

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

Bipartite operators on C^d (x) C^d and the complex linear algebra around them.

Index convention (external, 1-based): the entry <i j| M |k l> lives at flat
row d*(i-1)+j and flat column d*(k-1)+l. Internally everything is 0-based
numpy, and the 4-index tensor view is T[i, j, k, l] = M[(i, j), (k, l)].
"""

from enum import Enum
import logging
import math
from typing import Iterable, List, NamedTuple, Tuple, Union

import numpy as np
from scipy.stats import unitary_group

log = logging.getLogger(__name__)

MatrixLike = Union["BipartiteOperator", np.ndarray]
Entry = Tuple[int, int, int, int, complex]


class RankDeficientError(ValueError):
    """The polar factor of a singular matrix is not unique."""
    pass


# =============================================================================
# Index helpers
# =============================================================================

def flat_index(d: int, i: int, j: int) -> int:
    """1-based (i, j) -> 1-based flat index."""
    if not (1 <= i <= d and 1 <= j <= d):
        raise ValueError("Cell ({}, {}) out of range for d={}".format(i, j, d))
    return d * (i - 1) + j


def cell_index(d: int, flat: int) -> Tuple[int, int]:
    """1-based flat index -> 1-based (i, j)."""
    if not 1 <= flat <= d * d:
        raise ValueError("Flat index {} out of range for d={}".format(flat, d))
    i, j = divmod(flat - 1, d)
    return i + 1, j + 1


def local_dimension(n: int) -> int:
    d = math.isqrt(n)
    if d * d != n or d < 2:
        raise ValueError(
            "Order {} is not the square of a local dimension >= 2".format(n))
    return d


# =============================================================================
# BipartiteOperator
# =============================================================================

class BipartiteOperator(object):
    """
    Immutable complex matrix of order d^2. Stored dense; the sparse view
    (entries()) lists nonzeros only, sorted by (i, j, k, l).
    """

    def __init__(self, matrix: np.ndarray) -> None:
        m = np.array(matrix, dtype=complex)  # always a private copy
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Need a square matrix, got shape {}".format(
                m.shape))
        self.d = local_dimension(m.shape[0])
        m.setflags(write=False)
        self.matrix = m

    @classmethod
    def from_entries(cls, d: int,
                     entries: Iterable[Entry]) -> "BipartiteOperator":
        """Entries are 1-based (i, j, k, l, value); repeats are an error."""
        m = np.zeros((d * d, d * d), dtype=complex)
        seen = set()
        for i, j, k, l, value in entries:
            r = flat_index(d, i, j) - 1
            c = flat_index(d, k, l) - 1
            if (r, c) in seen:
                raise ValueError("Duplicate entry ({}, {}, {}, {})".format(
                    i, j, k, l))
            seen.add((r, c))
            m[r, c] = value
        return cls(m)

    @property
    def order(self) -> int:
        return self.d * self.d

    @property
    def tensor(self) -> np.ndarray:
        """Read-only view T[i, j, k, l] (0-based)."""
        return self.matrix.reshape((self.d,) * 4)

    def entry(self, i: int, j: int, k: int, l: int) -> complex:
        return complex(self.matrix[flat_index(self.d, i, j) - 1,
                                   flat_index(self.d, k, l) - 1])

    def entries(self) -> List[Entry]:
        rows, cols = np.nonzero(self.matrix)  # row-major, hence sorted
        d = self.d
        return [
            (r // d + 1, r % d + 1, c // d + 1, c % d + 1,
             complex(self.matrix[r, c]))
            for r, c in zip(rows.tolist(), cols.tolist())
        ]

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.matrix))

    def support(self, tol: float = 0.0) -> np.ndarray:
        """Boolean mask of entries with modulus > tol."""
        return np.abs(self.matrix) > tol

    def to_dense(self) -> np.ndarray:
        return np.array(self.matrix)

    def adjoint(self) -> "BipartiteOperator":
        return BipartiteOperator(self.matrix.conj().T)

    def __matmul__(self, other: "BipartiteOperator") -> "BipartiteOperator":
        return BipartiteOperator(self.matrix @ _as_matrix(other))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipartiteOperator):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.d, self.matrix.tobytes()))

    def allclose(self, other: MatrixLike, atol: float = 1e-12) -> bool:
        return np.allclose(self.matrix, _as_matrix(other), rtol=0, atol=atol)

    def __repr__(self) -> str:
        return "<BipartiteOperator(d={}, nnz={}) at {}>".format(
            self.d, self.nnz, hex(id(self)))


def _as_matrix(m: MatrixLike) -> np.ndarray:
    if isinstance(m, BipartiteOperator):
        return m.matrix
    return np.asarray(m, dtype=complex)


def as_operator(m: MatrixLike) -> BipartiteOperator:
    if isinstance(m, BipartiteOperator):
        return m
    return BipartiteOperator(m)


def from_dense(matrix: np.ndarray) -> BipartiteOperator:
    return BipartiteOperator(matrix)


def to_dense(op: BipartiteOperator) -> np.ndarray:
    return op.to_dense()


# =============================================================================
# Standard gates
# =============================================================================

def identity_gate(d: int) -> BipartiteOperator:
    return BipartiteOperator(np.eye(d * d))


def swap_gate(d: int) -> BipartiteOperator:
    """<i a| S |j b> = delta(i, b) delta(a, j)."""
    t = np.einsum('ib,aj->iajb', np.eye(d), np.eye(d))
    return BipartiteOperator(t.reshape(d * d, d * d))


def cnot_gate() -> BipartiteOperator:
    """Control on the first qubit."""
    m = np.eye(4)
    m[[2, 3]] = m[[3, 2]]
    return BipartiteOperator(m)


# =============================================================================
# Rearrangements
# =============================================================================

def realign(m: MatrixLike) -> BipartiteOperator:
    """<i j| M^R |a b> = <i a| M |j b>."""
    op = as_operator(m)
    d = op.d
    return BipartiteOperator(
        op.tensor.transpose(0, 2, 1, 3).reshape(d * d, d * d))


def partial_transpose(m: MatrixLike) -> BipartiteOperator:
    """<i b| M^G |j a> = <i a| M |j b>: transpose of each d x d block."""
    op = as_operator(m)
    d = op.d
    return BipartiteOperator(
        op.tensor.transpose(0, 3, 2, 1).reshape(d * d, d * d))


# =============================================================================
# Unitarity classification
# =============================================================================

def unitarity_deficit(m: MatrixLike) -> float:
    """Frobenius norm of M^dagger M - I."""
    a = _as_matrix(m)
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))


class UnitarityReport(NamedTuple):
    deficit_u: float
    deficit_r: float
    deficit_g: float
    tol: float

    @property
    def is_unitary(self) -> bool:
        return self.deficit_u < self.tol

    @property
    def is_dual(self) -> bool:
        return self.is_unitary and self.deficit_r < self.tol

    @property
    def is_tdual(self) -> bool:
        return self.is_unitary and self.deficit_g < self.tol

    @property
    def is_two_unitary(self) -> bool:
        return self.is_dual and self.is_tdual

    @property
    def max_deficit(self) -> float:
        return max(self.deficit_u, self.deficit_r, self.deficit_g)

    def as_dict(self) -> dict:
        return {
            'deficit_u': self.deficit_u,
            'deficit_r': self.deficit_r,
            'deficit_g': self.deficit_g,
            'tol': self.tol,
            'is_unitary': self.is_unitary,
            'is_dual': self.is_dual,
            'is_tdual': self.is_tdual,
            'is_two_unitary': self.is_two_unitary,
        }


def classify(m: MatrixLike, tol: float) -> UnitarityReport:
    if tol <= 0:
        raise ValueError("Tolerance must be positive, not {}".format(tol))
    op = as_operator(m)
    return UnitarityReport(
        deficit_u=unitarity_deficit(op),
        deficit_r=unitarity_deficit(realign(op)),
        deficit_g=unitarity_deficit(partial_transpose(op)),
        tol=tol,
    )


# =============================================================================
# States
# =============================================================================

class Bipartition(Enum):
    AB_CD = "AB|CD"
    AC_BD = "AC|BD"
    AD_BC = "AD|BC"

    @classmethod
    def parse(cls, text: str) -> "Bipartition":
        for member in cls:
            if member.value == text.upper():
                return member
        raise ValueError("Unknown bipartition {!r}".format(text))


_BIPARTITION_AXES = {
    Bipartition.AB_CD: (0, 1, 2, 3),
    Bipartition.AC_BD: (0, 2, 1, 3),
    Bipartition.AD_BC: (0, 3, 1, 2),
}


class StateVector(object):
    """Four-party pure state, amps indexed by (i, a, j, b) for A, B, C, D."""

    def __init__(self, d: int, amps: np.ndarray) -> None:
        a = np.array(amps, dtype=complex).reshape(-1)
        if a.shape[0] != d ** 4:
            raise ValueError("Need {} amplitudes for d={}, got {}".format(
                d ** 4, d, a.shape[0]))
        a.setflags(write=False)
        self.d = d
        self.amps = a

    @classmethod
    def basis(cls, d: int, ket: Tuple[int, int, int, int]) -> "StateVector":
        """Computational basis state, 1-based labels."""
        amps = np.zeros((d,) * 4, dtype=complex)
        amps[tuple(x - 1 for x in ket)] = 1
        return cls(d, amps)

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape((self.d,) * 4)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.amps))

    def __repr__(self) -> str:
        return "<StateVector(d={}, nnz={}, norm={:.6g})>".format(
            self.d, self.nnz, self.norm())


def vectorize(u: MatrixLike) -> StateVector:
    """amp(i, a, j, b) = <i a| U |j b> / d."""
    op = as_operator(u)
    return StateVector(op.d, op.matrix.reshape(-1) / op.d)


def devectorize(psi: StateVector) -> BipartiteOperator:
    d = psi.d
    return BipartiteOperator(psi.amps.reshape(d * d, d * d) * d)


def marginal_spectrum(psi: StateVector,
                      bipartition: Union[Bipartition, str]) -> np.ndarray:
    """Eigenvalues of the two-party reduced density matrix, descending."""
    if isinstance(bipartition, str):
        bipartition = Bipartition.parse(bipartition)
    d = psi.d
    m = psi.tensor.transpose(_BIPARTITION_AXES[bipartition]).reshape(
        d * d, d * d)
    rho = m @ m.conj().T
    return np.linalg.eigvalsh(rho)[::-1]


def is_uniform_spectrum(spectrum: np.ndarray, tol: float) -> bool:
    n = len(spectrum)
    return bool(np.all(np.abs(np.asarray(spectrum) - 1.0 / n) < tol))


# =============================================================================
# Nearest unitary / nearest product
# =============================================================================

def nearest_unitary(m: MatrixLike,
                    rank_tol: float = 1e-14) -> MatrixLike:
    """
    Polar factor W V^dagger of M = W S V^dagger. Returns the same kind
    (BipartiteOperator or ndarray) as it was given.
    """
    a = _as_matrix(m)
    w, s, vh = np.linalg.svd(a)
    if s[-1] <= rank_tol * max(s[0], 1.0):
        raise RankDeficientError(
            "Smallest singular value {:.3g} too small; polar factor not "
            "unique".format(s[-1]))
    u = w @ vh
    if isinstance(m, BipartiteOperator):
        return BipartiteOperator(u)
    return u


class ProductApproximation(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    overlap: float
    degenerate: bool


def nearest_product(v: np.ndarray,
                    degeneracy_tol: float = 1e-9) -> ProductApproximation:
    """
    Unit vectors a, b maximising |<a (x) b|v>|, which is the top Schmidt
    coefficient of v/|v|. The phase is chosen so that <a (x) b|v> > 0.
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("nearest_product of the zero vector")
    d = local_dimension(v.shape[0])
    w, s, vh = np.linalg.svd(v.reshape(d, d) / norm)
    degenerate = bool(s[1] >= s[0] - degeneracy_tol)
    if degenerate:
        log.debug("Degenerate top Schmidt coefficient {!r}".format(s[:2]))
    return ProductApproximation(a=w[:, 0], b=vh[0, :],
                                overlap=float(s[0]), degenerate=degenerate)


# =============================================================================
# Local unitary action
# =============================================================================

def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary of order n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(n, random_state=rng)


def random_local_unitaries(
        d: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    return tuple(haar_unitary(d, rng) for _ in range(4))


def local_dress(u: MatrixLike, u1: np.ndarray, u2: np.ndarray,
                v1: np.ndarray, v2: np.ndarray) -> BipartiteOperator:
    """(u1 (x) u2) U (v1 (x) v2)."""
    return BipartiteOperator(
        np.kron(u1, u2) @ _as_matrix(u) @ np.kron(v1, v2))


def state_lu_transform(psi: StateVector, u1: np.ndarray, u2: np.ndarray,
                       v1: np.ndarray, v2: np.ndarray) -> StateVector:
    """u1 (x) u2 (x) v1^T (x) v2^T on parties A, B, C, D."""
    t = np.einsum('ai,bj,ck,dl,ijkl->abcd',
                  u1, u2, np.transpose(v1), np.transpose(v2), psi.tensor)
    return StateVector(psi.d, t)


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def deficits_of(m: MatrixLike) -> Tuple[float, float, float]:
    r = classify(m, tol=1.0)
    return r.deficit_u, r.deficit_r, r.deficit_g


def frobenius_distance(a: MatrixLike, b: MatrixLike) -> float:
    return float(np.linalg.norm(_as_matrix(a) - _as_matrix(b)))


def product_vector(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)

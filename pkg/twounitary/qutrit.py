#!/usr/bin/env python
# twounitary/qutrit.py

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

Reduction of any two-qutrit 2-unitary to the permutation P9 by local
unitaries:

    (left1 (x) left2) U (right1 (x) right2) = P9

Pipeline:

1.  find a product state x (x) y with U (x (x) y) = x' (x) y' and anchor it
    at |11>: U1 = (a2 (x) b2)^dag U (a1 (x) b1), first columns of a1, b1,
    a2, b2 being x, y, x', y'. 2-unitarity then leaves 33 possible
    nonzeros.
2.  SVD of the 2 x 2 block P (rows 2-3, cols 5-6), shared with Q (rows 2-3,
    cols 8-9), diagonalizes both from the second factor.
3.  the unitary sigma matrix of singular values, applied on the first
    factor from the right, leaves an enphased-permutation skeleton with a
    2 x 2 unitary C in rows 4, 7.
4.  C^dag on the first factor from the left leaves four phases alpha.
5.  diagonal phase matrices (principal cube roots) remove them.

Matrix positions in comments and masks are 1-based, code is 0-based.
"""

import logging
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from twounitary.constants import (
    DEFAULT_TOLERANCE,
    PRODUCT_PAIR_MAX_ITER,
    PRODUCT_PAIR_MAX_RESTARTS,
    PRODUCT_PAIR_TOLERANCE,
    STAGE_TOLERANCE,
)
from twounitary.latin import PermutationGate
from twounitary.tensorcore import (
    BipartiteOperator,
    MatrixLike,
    as_operator,
    classify,
    frobenius_distance,
    nearest_product,
    random_unit_vector,
    unitarity_deficit,
)

log = logging.getLogger(__name__)

Cell = Tuple[int, int]


class NoProductPairError(ValueError):
    pass


class ZeroPatternError(ValueError):
    pass


# =============================================================================
# P9
# =============================================================================

P9_IMAGES = (11, 23, 32, 33, 12, 21, 22, 31, 13)


def p9() -> PermutationGate:
    """P9 |x> = |pi(x)>, x = 11, 12, ..., 33 and pi(x) from P9_IMAGES."""
    return PermutationGate.from_column_images(
        3, [divmod(c, 10) for c in P9_IMAGES])


def p9_matrix() -> np.ndarray:
    return np.array(p9().operator.matrix)


# =============================================================================
# Zero patterns
# =============================================================================

class ZeroPattern(object):
    """9 x 9 mask; True marks entries allowed to be nonzero."""

    def __init__(self, name: str, rows: List[str]) -> None:
        self.name = name
        self.allowed = np.array([[ch == '*' for ch in r] for r in rows])
        self.allowed.setflags(write=False)

    @property
    def zero_mask(self) -> np.ndarray:
        return ~self.allowed

    @property
    def n_allowed(self) -> int:
        return int(self.allowed.sum())

    def violation(self, matrix: np.ndarray) -> float:
        """Largest modulus among the entries that must vanish."""
        bad = np.abs(np.asarray(matrix))[self.zero_mask]
        return float(bad.max()) if bad.size else 0.0

    def __repr__(self) -> str:
        return "<ZeroPattern({}, {} allowed)>".format(self.name,
                                                      self.n_allowed)


DUAL_FORM = ZeroPattern('dual', [
    "*........",
    "...******",
    "...******",
    ".**.**.**",
    ".********",
    ".********",
    ".**.**.**",
    ".********",
    ".********",
])
TWO_UNITARY_FORM = ZeroPattern('two_unitary', [
    "*........",
    "....**.**",
    "....**.**",
    "....**.**",
    ".********",
    ".********",
    "....**.**",
    ".********",
    ".********",
])
ANCHORED_FORM = ZeroPattern('anchored', [
    "*........",
    "....**.**",
    "....**.**",
    "....**.**",
    ".***..*..",
    ".***..*..",
    "....**.**",
    ".***..*..",
    ".***..*..",
])
STEP2_FORM = ZeroPattern('step2', [
    "*........",
    "....*..*.",
    ".....*..*",
    "....**.**",
    "..**..*..",
    ".*.*..*..",
    "....**.**",
    "..**..*..",
    ".*.*..*..",
])
STEP3_FORM = ZeroPattern('step3', [
    "*........",
    "....*....",
    "........*",
    ".....*.*.",
    "..*...*..",
    ".*.*.....",
    ".....*.*.",
    "..*...*..",
    ".*.*.....",
])
STEP4_FORM = ZeroPattern('step4', [
    "*........",
    "....*....",
    "........*",
    ".....*...",
    "......*..",
    ".*.......",
    ".......*.",
    "..*......",
    "...*.....",
])

# (row, col) of alpha_1 .. alpha_4 in U4
ALPHA_POSITIONS = ((5, 1), (4, 6), (7, 2), (8, 3))


# =============================================================================
# Product pair search
# =============================================================================

class ProductPair(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    xp: np.ndarray
    yp: np.ndarray
    residual: float  # |U (x (x) y) - x' (x) y'|


def _forward(m: np.ndarray, x: np.ndarray, y: np.ndarray) \
        -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Nearest product x' (x) y' to U (x (x) y), phase absorbed into x', and
    the residual distance.
    """
    v = m @ np.kron(x, y)
    approx = nearest_product(v)
    ab = np.kron(approx.a, approx.b)
    inner = np.vdot(ab, v)
    xp = approx.a * (inner / abs(inner))
    residual = float(np.linalg.norm(v - np.kron(xp, approx.b)))
    return xp, approx.b, residual


def find_fixed_product_pair(u: MatrixLike, seed: int = 0,
                            tol: float = PRODUCT_PAIR_TOLERANCE,
                            max_restarts: int = PRODUCT_PAIR_MAX_RESTARTS,
                            max_iter: int = PRODUCT_PAIR_MAX_ITER) \
        -> ProductPair:
    """
    Product x (x) y mapped by U to a product x' (x) y'. Computational basis
    products are tried first; then alternating projections from seeded
    random starts: forward through U to the nearest product, back through
    U^dag to the nearest product, until the forward residual is below
    tol * 10.
    """
    op = as_operator(u)
    d = op.d
    m = op.matrix
    target = tol * 10
    eye = np.eye(d)
    for i in range(d):
        for j in range(d):
            xp, yp, residual = _forward(m, eye[i], eye[j])
            if residual < target:
                log.debug("Basis product |{}{}> is mapped to a product".format(
                    i + 1, j + 1))
                return ProductPair(eye[i], eye[j], xp, yp, residual)
    mdag = m.conj().T
    rng = np.random.default_rng(seed)
    best = np.inf
    for restart in range(max_restarts):
        x = random_unit_vector(d, rng)
        y = random_unit_vector(d, rng)
        previous = np.inf
        slow = 0
        for iteration in range(max_iter):
            xp, yp, residual = _forward(m, x, y)
            best = min(best, residual)
            if residual < target:
                log.debug("Product pair found: restart {}, iteration {}, "
                          "residual {:.3g}".format(restart, iteration,
                                                   residual))
                return ProductPair(x, y, xp, yp, residual)
            slow = slow + 1 if residual > previous * 0.999 else 0
            if slow >= 20:
                break
            previous = residual
            back = nearest_product(mdag @ np.kron(xp, yp))
            x, y = back.a, back.b
        log.debug("Restart {} stalled at residual {:.3g}".format(
            restart, previous))
    raise NoProductPairError(
        "No product pair after {} restarts (best residual {:.3g})".format(
            max_restarts, best))


# =============================================================================
# Anchoring
# =============================================================================

def complete_unitary(v: np.ndarray) -> np.ndarray:
    """Unitary whose first column is the unit vector v."""
    v = np.asarray(v, dtype=complex)
    n = v.shape[0]
    q, r = scipy.linalg.qr(np.column_stack([v, np.eye(n)]))
    q = np.array(q[:, :n])
    q[:, 0] *= r[0, 0]
    return q


class Factors(NamedTuple):
    left1: np.ndarray
    left2: np.ndarray
    right1: np.ndarray
    right2: np.ndarray

    def apply(self, m: np.ndarray) -> np.ndarray:
        return (np.kron(self.left1, self.left2) @ m @
                np.kron(self.right1, self.right2))


def anchor_factors(u: MatrixLike, pair: ProductPair,
                   tol: float = 1e-8) -> Factors:
    op = as_operator(u)
    m = op.matrix
    miss = np.linalg.norm(m @ np.kron(pair.x, pair.y) -
                          np.kron(pair.xp, pair.yp))
    if miss > tol:
        raise NoProductPairError(
            "Pair is not mapped to a product (miss {:.3g})".format(miss))
    a1 = complete_unitary(pair.x)
    b1 = complete_unitary(pair.y)
    a2 = complete_unitary(pair.xp)
    b2 = complete_unitary(pair.yp)
    f = Factors(a2.conj().T, b2.conj().T, a1, b1)
    corner = f.apply(m)[0, 0]
    phase = corner / abs(corner)
    return Factors(f.left1 * phase.conjugate(), f.left2, f.right1, f.right2)


def anchor(u: MatrixLike, pair: ProductPair) -> BipartiteOperator:
    """U1 = (a2 (x) b2)^dag U (a1 (x) b1), with <11|U1|11> = +1."""
    return BipartiteOperator(anchor_factors(u, pair).apply(
        as_operator(u).matrix))


# =============================================================================
# Reduction
# =============================================================================

class StageRecord(NamedTuple):
    stage: str
    violation: float
    note: str = ""


class LuFactorization(object):
    def __init__(self, left1: np.ndarray, left2: np.ndarray,
                 right1: np.ndarray, right2: np.ndarray,
                 residual: float,
                 stage_log: Optional[List[StageRecord]] = None) -> None:
        self.left1 = left1
        self.left2 = left2
        self.right1 = right1
        self.right2 = right2
        self.residual = residual
        self.stage_log = stage_log or []

    @property
    def factors(self) -> Factors:
        return Factors(self.left1, self.left2, self.right1, self.right2)

    def as_dict(self) -> Dict[str, object]:
        def cm(a: np.ndarray) -> List[List[List[float]]]:
            return [[[float(z.real), float(z.imag)] for z in row]
                    for row in a]

        return {
            'left1': cm(self.left1),
            'left2': cm(self.left2),
            'right1': cm(self.right1),
            'right2': cm(self.right2),
            'residual': self.residual,
            'stage_log': [s._asdict() for s in self.stage_log],
        }

    def __repr__(self) -> str:
        return "<LuFactorization(residual={:.3g}, stages={})>".format(
            self.residual, [s.stage for s in self.stage_log])


def _diag1(block: np.ndarray) -> np.ndarray:
    """1 (+) block."""
    out = np.eye(3, dtype=complex)
    out[1:, 1:] = block
    return out


def _check(stage: str, pattern: ZeroPattern, m: np.ndarray, tol: float,
           stage_log: List[StageRecord], note: str = "") -> None:
    v = pattern.violation(m)
    stage_log.append(StageRecord(stage, v, note))
    log.debug("Stage {}: zero-pattern violation {:.3g}".format(stage, v))
    if v > tol:
        raise ZeroPatternError(
            "Stage {}: entry of modulus {:.3g} where {} pattern has a "
            "zero".format(stage, v, pattern.name))


def _block_relations(p: np.ndarray, q: np.ndarray) -> float:
    """Largest violation of the unitarity / T-dual / dual block relations."""
    eye = np.eye(2)
    return max(
        np.linalg.norm(p @ p.conj().T + q @ q.conj().T - eye),
        np.linalg.norm(p.conj().T @ p + q.conj().T @ q - eye),
        abs(np.trace(p.conj().T @ p) - 1),
        abs(np.trace(q.conj().T @ q) - 1),
        abs(np.trace(p.conj().T @ q)),
    )


def _joint_svd(p: np.ndarray, q: np.ndarray, tol: float) \
        -> Tuple[np.ndarray, np.ndarray, str]:
    """
    V1, W1 with V1^dag P W1 and V1^dag Q W1 both diagonal. When P has equal
    singular values the SVD basis is arbitrary; then V1 diagonalizes the
    normal matrix 2 Q P^dag (complex Schur form) and W1 = sqrt(2) P^dag V1.
    """
    v1, s, w1h = np.linalg.svd(p)
    candidates = [('svd', v1, w1h.conj().T)]
    t, z = scipy.linalg.schur(2 * q @ p.conj().T, output='complex')
    schur = ('schur', z, np.sqrt(2) * p.conj().T @ z)
    if s[0] - s[1] < 1e-4:
        log.info("Degenerate singular values {!r} of P".format(s))
        candidates.insert(0, schur)
    else:
        candidates.append(schur)
    for name, v, w in candidates:
        if unitarity_deficit(w) > tol:
            continue
        dp = v.conj().T @ p @ w
        dq = v.conj().T @ q @ w
        off = max(abs(dp[0, 1]), abs(dp[1, 0]), abs(dq[0, 1]), abs(dq[1, 0]))
        if off < tol:
            return v, w, name
    raise ZeroPatternError("P and Q cannot be diagonalized together")


def cube_root(z: complex) -> complex:
    """Principal cube root with arg(z) taken in [0, 2 pi)."""
    arg = np.angle(z) % (2 * np.pi)
    return abs(z) ** (1 / 3) * np.exp(1j * arg / 3)


def phase_factors(alphas: Tuple[complex, complex, complex, complex]) \
        -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    a1, a2, a3, a4 = alphas
    c = np.conj
    phi1 = np.diag([1, cube_root(c(a1) * c(a2)), cube_root(c(a3) * c(a4))])
    phi2 = np.diag([1, cube_root(c(a2) * c(a3)), cube_root(c(a1) * c(a4))])
    phi3 = np.diag([1, cube_root(a1 * a3 * c(a4)), cube_root(a1 * a3 * c(a2))])
    phi4 = np.diag([1, cube_root(a2 * a4 * c(a1)), cube_root(a2 * a4 * c(a3))])
    return phi1, phi2, phi3, phi4


def _phase_cleanup(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray,
                                           np.ndarray, np.ndarray, float]:
    """
    Diagonal phases D1..D4 with (D1 (x) D2) M (D3 (x) D4) real positive on
    the P9 support; the 9 x 12 angle system has full row rank. Returns the
    four diagonals and the largest angle removed.
    """
    rows, cols = np.nonzero(p9_matrix())
    a = np.zeros((len(rows), 12))
    angles = np.angle(m[rows, cols])
    for e, (r, c) in enumerate(zip(rows, cols)):
        i, j = divmod(int(r), 3)
        k, l = divmod(int(c), 3)
        a[e, [i, 3 + j, 6 + k, 9 + l]] = 1
    sol = np.linalg.lstsq(a, -angles, rcond=None)[0]
    phases = np.exp(1j * sol)
    return (np.diag(phases[0:3]), np.diag(phases[3:6]),
            np.diag(phases[6:9]), np.diag(phases[9:12]),
            float(np.max(np.abs(angles))))


def reduce_to_p9(u: MatrixLike, seed: int = 0,
                 tol: float = DEFAULT_TOLERANCE,
                 stage_tol: float = STAGE_TOLERANCE,
                 pair: Optional[ProductPair] = None) -> LuFactorization:
    op = as_operator(u)
    if op.d != 3:
        raise ValueError("reduce_to_p9 needs d=3, got d={}".format(op.d))
    report = classify(op, tol)
    if not report.is_two_unitary:
        raise ValueError("Input is not 2-unitary at tol {} (deficits {:.3g}, "
                         "{:.3g}, {:.3g})".format(tol, *report[:3]))
    m = op.matrix
    stage_log = []  # type: List[StageRecord]

    # 1. anchor
    if pair is None:
        pair = find_fixed_product_pair(op, seed=seed)
    f = anchor_factors(op, pair)
    u1 = f.apply(m)
    _check('anchor', ANCHORED_FORM, u1, stage_tol, stage_log,
           "pair residual {:.3g}".format(pair.residual))

    # 2. joint SVD of P and Q
    p = u1[1:3, 4:6]
    q = u1[1:3, 7:9]
    relations = _block_relations(p, q)
    if relations > stage_tol:
        raise ZeroPatternError(
            "Block relations of P, Q violated by {:.3g}".format(relations))
    v1, w1, how = _joint_svd(p, q, stage_tol)
    f = Factors(f.left1, _diag1(v1.conj().T) @ f.left2,
                f.right1, f.right2 @ _diag1(w1))
    u2 = f.apply(m)
    _check('step2', STEP2_FORM, u2, stage_tol, stage_log,
           "blocks diagonalized by {}".format(how))

    # 3. sigma matrix on the first factor, from the right
    sigma = np.array([[u2[1, 4], u2[1, 7]],
                      [u2[2, 5], u2[2, 8]]])
    if unitarity_deficit(sigma) > stage_tol:
        raise ZeroPatternError("sigma matrix not unitary (deficit {:.3g})"
                               .format(unitarity_deficit(sigma)))
    f = Factors(f.left1, f.left2, f.right1 @ _diag1(sigma.conj().T),
                f.right2)
    u3 = f.apply(m)
    _check('step3', STEP3_FORM, u3, stage_tol, stage_log)

    # 4. C on the first factor, from the left
    c = np.array([[u3[3, 5], u3[3, 7]],
                  [u3[6, 5], u3[6, 7]]])
    f = Factors(_diag1(c.conj().T) @ f.left1, f.left2, f.right1, f.right2)
    u4 = f.apply(m)
    _check('step4', STEP4_FORM, u4, stage_tol, stage_log)

    # 5. phases
    alphas = tuple(u4[r, col] for r, col in ALPHA_POSITIONS)
    phi1, phi2, phi3, phi4 = phase_factors(alphas)
    f = Factors(phi1 @ f.left1, phi2 @ f.left2,
                f.right1 @ phi3, f.right2 @ phi4)
    u5 = f.apply(m)
    d1, d2, d3, d4, leftover = _phase_cleanup(u5)
    note = ""
    if leftover > stage_tol:
        note = "cube-root branch correction {:.3g} rad".format(leftover)
        log.info(note)
    f = Factors(d1 @ f.left1, d2 @ f.left2, f.right1 @ d3, f.right2 @ d4)
    final = f.apply(m)
    target = p9_matrix()
    _check('phases', STEP4_FORM, final, stage_tol, stage_log, note)
    residual = frobenius_distance(final, target)
    log.debug("Reduced to P9 with residual {:.3g}".format(residual))
    return LuFactorization(f.left1, f.left2, f.right1, f.right2,
                           residual, stage_log)


def verify_factorization(u: MatrixLike, f: LuFactorization,
                         tol: float = DEFAULT_TOLERANCE) -> bool:
    for name, factor in f.factors._asdict().items():
        deficit = unitarity_deficit(factor)
        if deficit >= tol:
            log.debug("Factor {} not unitary: {:.3g}".format(name, deficit))
            return False
    distance = frobenius_distance(f.factors.apply(as_operator(u).matrix),
                                  p9_matrix())
    return bool(distance < tol)


def invert_factorization(f: LuFactorization) -> BipartiteOperator:
    """U = (left1 (x) left2)^dag P9 (right1 (x) right2)^dag."""
    left = np.kron(f.left1, f.left2).conj().T
    right = np.kron(f.right1, f.right2).conj().T
    return BipartiteOperator(left @ p9_matrix() @ right)


class ProductBases(NamedTuple):
    """
    U (alpha[:, i] (x) beta[:, j]) = alpha_prime[:, k] (x) beta_prime[:, l]
    for (k, l) = image[(i, j)]; all 1-based in image, 0-based columns.
    """
    alpha: np.ndarray
    beta: np.ndarray
    alpha_prime: np.ndarray
    beta_prime: np.ndarray
    image: Dict[Cell, Cell]


def product_bases(f: LuFactorization) -> ProductBases:
    gate = p9()
    image = {col: row for row, col in gate.row_map.items()}
    return ProductBases(
        alpha=f.right1,
        beta=f.right2,
        alpha_prime=f.left1.conj().T,
        beta_prime=f.left2.conj().T,
        image=image,
    )

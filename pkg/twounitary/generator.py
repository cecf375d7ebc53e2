#!/usr/bin/env python
# twounitary/generator.py

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

Seeded search for 2-unitaries by alternating nearest-unitary projections in
the three frames U, U^R and U^Gamma.
"""

from concurrent.futures import ThreadPoolExecutor
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from twounitary.constants import (
    GENERATOR_MAX_ITER,
    GENERATOR_STALL_RATIO,
    GENERATOR_STALL_WINDOW,
    GENERATOR_TOLERANCE,
)
from twounitary.settings import get_num_threads
from twounitary.tensorcore import (
    BipartiteOperator,
    MatrixLike,
    as_operator,
    haar_unitary,
    nearest_unitary,
    partial_transpose,
    realign,
    unitarity_deficit,
)

log = logging.getLogger(__name__)

Deficits = Tuple[float, float, float]

FRAMES = ('U', 'R', 'G')


def random_unitary(n: int, seed) -> np.ndarray:
    """Haar-random unitary; seed is an int or a numpy Generator."""
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(seed)
    return haar_unitary(n, rng)


class SearchResult(object):
    def __init__(self, u: BipartiteOperator, deficits: List[Deficits],
                 iterations: int, converged: bool, seed: int,
                 tol: float, stalled: bool = False) -> None:
        self.u = u
        self.deficits = deficits
        self.iterations = iterations
        self.converged = converged
        self.seed = seed
        self.tol = tol
        self.stalled = stalled

    @property
    def final_deficits(self) -> Deficits:
        return self.deficits[-1] if self.deficits else (np.inf,) * 3

    @property
    def combined_deficit(self) -> float:
        return max(self.final_deficits)

    @property
    def min_combined_deficit(self) -> float:
        return min((max(x) for x in self.deficits), default=np.inf)

    def __repr__(self) -> str:
        return ("<SearchResult(d={}, seed={}, iterations={}, converged={}, "
                "stalled={}, deficit={:.3g})>".format(
                    self.u.d, self.seed, self.iterations, self.converged,
                    self.stalled, self.combined_deficit))


def _project(m: np.ndarray, frame: str) -> np.ndarray:
    """Nearest unitary in the given frame, mapped back."""
    if frame == 'U':
        return nearest_unitary(m)
    if frame == 'R':
        return realign(nearest_unitary(realign(m).matrix)).matrix
    return partial_transpose(
        nearest_unitary(partial_transpose(m).matrix)).matrix


def frame_deficits(m: np.ndarray) -> Deficits:
    return (unitarity_deficit(m),
            unitarity_deficit(realign(m)),
            unitarity_deficit(partial_transpose(m)))


def search_two_unitary(d: int, seed: int,
                       max_iter: int = GENERATOR_MAX_ITER,
                       tol: float = GENERATOR_TOLERANCE,
                       initial: Optional[MatrixLike] = None,
                       order: str = 'fixed',
                       stall_window: int = GENERATOR_STALL_WINDOW,
                       stall_ratio: float = GENERATOR_STALL_RATIO) \
        -> SearchResult:
    """
    Repeat U -> nearest unitary in the U, R and Gamma frames until all
    three deficits are below tol. order='random' shuffles the frames each
    sweep (seeded). A run whose best combined deficit has not improved by
    the factor (1 - stall_ratio) over stall_window sweeps stops as stalled.
    """
    if d < 2:
        raise ValueError("d must be >= 2, not {}".format(d))
    if order not in ('fixed', 'random'):
        raise ValueError("order must be 'fixed' or 'random'")
    rng = np.random.default_rng(seed)
    if initial is None:
        m = random_unitary(d * d, rng)
    else:
        m = np.array(as_operator(initial).matrix)
        if m.shape != (d * d, d * d):
            raise ValueError("initial has shape {}, expected d^2 = {}".format(
                m.shape, d * d))
    order_rng = np.random.default_rng([seed, 1])
    deficits = []  # type: List[Deficits]
    best_history = []  # type: List[float]
    best = np.inf
    converged = False
    stalled = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        frames = list(FRAMES)
        if order == 'random':
            order_rng.shuffle(frames)
        for frame in frames:
            m = _project(m, frame)
        current = frame_deficits(m)
        deficits.append(current)
        best = min(best, max(current))
        best_history.append(best)
        if max(current) < tol:
            converged = True
            break
        if (iteration > stall_window and
                best > best_history[-stall_window - 1] * (1 - stall_ratio)):
            stalled = True
            log.debug("Seed {}: stalled at iteration {} (deficit {:.3g})"
                      .format(seed, iteration, best))
            break
        if iteration % 100 == 0:
            log.debug("Seed {}: iteration {}, deficits {}".format(
                seed, iteration, current))
    result = SearchResult(BipartiteOperator(m), deficits, iteration,
                          converged, seed, tol, stalled)
    log.info("{!r}".format(result))
    return result


def search_sweep(d: int, seeds: Sequence[int],
                 workers: Optional[int] = None,
                 **kwargs) -> List[SearchResult]:
    """Independent searches, one per seed; results in seed order."""
    workers = workers or get_num_threads()
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(
            lambda s: search_two_unitary(d, s, **kwargs), seeds))

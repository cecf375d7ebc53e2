#!/usr/bin/env python
# twounitary/tests/test_invariants.py

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
"""

import cmath
import math

import numpy as np
import pytest

from twounitary.invariants import (
    ContractionBudgetError,
    MultiSubset,
    PermTuple,
    balance_rank,
    balance_system,
    balanced_multisets,
    build_L,
    canonical_n4_tuple,
    contract_invariant,
    latin_rectangle_check,
    moment,
    multisets_from_odls,
    odls_invariant,
    perms_from_multisets,
    rearrangement_moments,
)
from twounitary.latin import (
    NotDiagonalError,
    construct_odls,
    construct_ols,
    enphase,
    gate_from_ols,
    odls4,
    p16,
    p16_theta,
)
from twounitary.qutrit import p9
from twounitary.tensorcore import (
    BipartiteOperator,
    haar_unitary,
    local_dress,
    random_local_unitaries,
    realign,
    swap_gate,
)
from twounitary.tests.conftest import random_complex_matrix


def random_perm_tuple(n: int, rng: np.random.Generator) -> PermTuple:
    return PermTuple(*[list(rng.permutation(n) + 1) for _ in range(4)])


def p16_closed_form(theta: float) -> float:
    return 8 * (29 + 3 * math.cos(theta))


# =============================================================================
# Permutation tuples
# =============================================================================

def test_perm_tuple_validation():
    with pytest.raises(ValueError):
        PermTuple((1, 2), (1, 1), (1, 2), (2, 1))
    with pytest.raises(ValueError):
        PermTuple((), (), (), ())
    t = PermTuple.identity(3)
    assert t.n == 3
    assert not t.latin_rectangle


def test_canonical_tuple():
    t = canonical_n4_tuple()
    assert t.sigma == (1, 2, 3, 4)
    assert t.lam == (4, 3, 2, 1)
    assert latin_rectangle_check(t)
    assert t.inverse() == t  # all four are involutions


def test_with_identity_row():
    t = canonical_n4_tuple(identity_row='tau')
    assert t.tau == (1, 2, 3, 4)
    assert t.sigma == (2, 1, 4, 3)


# =============================================================================
# Contraction
# =============================================================================

@pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi, 1.0])
def test_p16_theta_closed_form(theta):
    u = p16_theta(theta)
    value = contract_invariant(u, canonical_n4_tuple())
    assert value.real == pytest.approx(p16_closed_form(theta), rel=1e-8)
    assert abs(value.imag) < 1e-8
    assert moment(u, 2).real == pytest.approx(value.real, rel=1e-8)


def test_p16_special_values():
    assert p16_closed_form(0) == 256
    assert contract_invariant(p16().operator, canonical_n4_tuple()) == \
        pytest.approx(256)
    assert contract_invariant(p16_theta(math.pi),
                              canonical_n4_tuple()).real == \
        pytest.approx(208)


@pytest.mark.parametrize("seed", range(10))
def test_contraction_methods_agree(seed):
    rng = np.random.default_rng(seed)
    a = random_complex_matrix(4, rng)
    n = 1 + seed % 4
    perms = random_perm_tuple(n, rng)
    sparse = contract_invariant(a, perms, method='sparse', workers=2,
                                chunk_terms=64)
    dense = contract_invariant(a, perms, method='dense')
    network = contract_invariant(a, perms, method='network')
    assert sparse == pytest.approx(dense, abs=1e-10, rel=1e-10)
    assert network == pytest.approx(dense, abs=1e-10, rel=1e-10)


def test_sparse_contraction_is_deterministic_across_workers(rng):
    u = p16_theta(0.3)
    perms = canonical_n4_tuple()
    one = contract_invariant(u, perms, method='sparse', workers=1,
                             chunk_terms=1000)
    many = contract_invariant(u, perms, method='sparse', workers=4,
                              chunk_terms=1000)
    assert one == many


@pytest.mark.parametrize("d, n", [(d, n) for d in (2, 3, 4)
                                  for n in (2, 3, 4)])
def test_invariant_under_local_unitaries(d, n):
    rng = np.random.default_rng(100 * d + n)
    a = random_complex_matrix(d * d, rng)
    perms = random_perm_tuple(n, rng)
    before = contract_invariant(a, perms, method='network')
    after = contract_invariant(
        local_dress(a, *random_local_unitaries(d, rng)), perms,
        method='network')
    assert after == pytest.approx(before, rel=1e-8, abs=1e-9)


@pytest.mark.parametrize("d, seed", [(d, s) for d in (2, 3)
                                     for s in range(3)])
def test_canonical_invariant_is_second_moment(d, seed):
    u = haar_unitary(d * d, np.random.default_rng(200 + seed))
    value = contract_invariant(u, canonical_n4_tuple(), method='network')
    assert value == pytest.approx(moment(u, 2), rel=1e-8, abs=1e-9)


def test_inverse_tuple_conjugates(rng):
    a = random_complex_matrix(4, rng)
    perms = random_perm_tuple(3, rng)
    assert contract_invariant(a, perms.inverse()) == pytest.approx(
        contract_invariant(a, perms).conjugate(), rel=1e-10, abs=1e-10)


def test_equivalent_tuples_agree(rng):
    a = random_complex_matrix(4, rng)
    perms = random_perm_tuple(4, rng)
    assert contract_invariant(a, perms.with_identity_row('rho')) == \
        pytest.approx(contract_invariant(a, perms), rel=1e-10, abs=1e-10)


def test_contraction_budget():
    perms = canonical_n4_tuple()
    with pytest.raises(ContractionBudgetError):
        contract_invariant(p16().operator, perms, method='sparse', budget=10)
    with pytest.raises(ContractionBudgetError):
        contract_invariant(p16().operator, perms, method='dense', budget=10)
    with pytest.raises(ValueError):
        contract_invariant(p16().operator, perms, method='magic')
    # auto falls back to the tensor network when enumeration is too big
    assert contract_invariant(p16().operator, perms, budget=10) == \
        pytest.approx(256)


def test_zero_operator():
    z = BipartiteOperator(np.zeros((4, 4)))
    assert contract_invariant(z, canonical_n4_tuple(), method='sparse') == 0


# =============================================================================
# Moments
# =============================================================================

@pytest.mark.parametrize("u", [
    swap_gate(2),
    swap_gate(3),
    p9().operator,
    p16().operator,
])
def test_first_moment_of_dual_unitaries(u):
    assert moment(u, 1) == pytest.approx(u.d ** 2, abs=1e-9)


@pytest.mark.parametrize("d, seed", [(d, s) for d in (2, 3)
                                     for s in range(5)])
def test_first_moment_of_random_unitaries(d, seed):
    u = haar_unitary(d * d, np.random.default_rng(seed))
    r = realign(u).matrix
    rr = r @ r.conj().T
    expected = np.trace(rr @ rr)
    assert moment(u, 1) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("d, seed", [(d, s) for d in (2, 3)
                                     for s in range(3)])
def test_moments_survive_swap_conjugation(d, seed):
    u = haar_unitary(d * d, np.random.default_rng(300 + seed))
    s = swap_gate(d).matrix
    sus = s @ u @ s
    assert not np.allclose(build_L(u).matrix, build_L(sus).matrix)
    for k in (1, 2, 3):
        assert moment(sus, k) == pytest.approx(moment(u, k), rel=1e-8,
                                               abs=1e-9)


def test_moment_order_must_be_positive():
    with pytest.raises(ValueError):
        moment(swap_gate(2), 0)


def test_build_L_dimensions():
    lop = build_L(swap_gate(2))
    assert lop.matrix.shape == (16, 16)
    assert lop.trace() == pytest.approx(4)


def test_rearrangement_moments():
    m = rearrangement_moments(p16_theta(0.7), 2)
    assert set(m) == {'U', 'R', 'G'}
    assert m['U'].real == pytest.approx(p16_closed_form(0.7), rel=1e-8)


# =============================================================================
# Multi-subsets and the ODLS invariant
# =============================================================================

def test_multisets_from_odls4():
    ms = multisets_from_odls(odls4())
    assert ms.x.elements() == [(1, 1, 1, 2), (2, 2, 2, 1),
                               (3, 3, 3, 4), (4, 4, 4, 3)]
    assert ms.y.elements() == [(1, 4, 2, 4), (2, 3, 1, 3),
                               (3, 2, 4, 2), (4, 1, 3, 1)]
    assert (ms.x.counting_functions() == 1).all()
    assert (ms.y.counting_functions() == 1).all()
    assert ms.sigma == (1, 2, 3, 4)
    assert ms.tau == (4, 3, 2, 1)
    assert ms.rho == (2, 1, 4, 3)
    assert ms.lam == (3, 4, 1, 2)


def test_multisets_need_diagonal_pair():
    with pytest.raises(NotDiagonalError):
        multisets_from_odls(construct_ols(3))


@pytest.mark.parametrize("pair_factory", [odls4, lambda: construct_odls(5)])
def test_odls_invariant_depends_on_phase(pair_factory):
    pair = pair_factory()
    gate = gate_from_ols(pair)

    def value(theta: float) -> complex:
        p = enphase(gate, {(1, 1): cmath.exp(1j * theta)})
        return odls_invariant(p, pair)

    assert abs(value(0.0) - value(math.pi)) > 1e-6


def test_multisubset_basics():
    x = MultiSubset.from_elements(2, [(1, 1, 1, 1), (2, 2, 2, 2),
                                      (1, 1, 1, 1)])
    assert x.size == 3
    assert x.counting_functions().tolist() == [[2, 1]] * 4
    assert x == MultiSubset(2, {(1, 1, 1, 1): 2, (2, 2, 2, 2): 1})
    with pytest.raises(ValueError):
        MultiSubset(2, {(1, 1, 1, 1): -1})


def test_perms_from_unbalanced_multisets():
    x = MultiSubset.from_elements(2, [(1, 1, 1, 1)])
    y = MultiSubset.from_elements(2, [(2, 1, 1, 1)])
    with pytest.raises(ValueError):
        perms_from_multisets(x, y)


@pytest.mark.parametrize("gate_factory", [
    p16,
    lambda: gate_from_ols(construct_ols(5)),
])
def test_balanced_multisets(gate_factory):
    gate = gate_factory()
    d = gate.d
    rows = balance_system(gate)
    assert len(rows) == 4 * d
    assert all(len(r) == d * d for r in rows)
    assert balance_rank(gate) <= 4 * d - 3
    x, y = balanced_multisets(gate)
    assert x != y
    assert x.size == y.size > 0
    assert (x.counting_functions() == y.counting_functions()).all()
    perms = perms_from_multisets(x, y)
    assert perms.n == x.size

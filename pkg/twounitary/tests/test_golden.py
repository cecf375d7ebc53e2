#!/usr/bin/env python
# twounitary/tests/test_golden.py

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
from numpy.testing import assert_allclose
import pytest

from twounitary.constants import U36_FILE_ENV_VAR
from twounitary.golden import (
    D_THETA_ROWS,
    GoldenConstants,
    GoldenDataError,
    build_phase_system,
    check_u36,
    d_double_prime,
    d_prime,
    d_theta,
    enphase_solution,
    exact_rank,
    in_span,
    load_u36,
    loads_u36,
    nullspace_basis,
    theta_direction,
    u36_available,
    u36_theta,
)
from twounitary.invariants import canonical_n4_tuple, contract_invariant
from twounitary.matrixio import MatrixFormatError
from twounitary.tensorcore import (
    BipartiteOperator,
    classify,
    deficits_of,
    haar_unitary,
    identity_gate,
    partial_transpose,
    realign,
)
from twounitary.settings import set_u36_path
from twounitary.tests.conftest import requires_u36

TOL = 1e-10


# =============================================================================
# Constants and file format
# =============================================================================

def test_golden_constants():
    g = GoldenConstants
    assert g.phi ** 2 == pytest.approx(g.phi + 1)
    assert g.a ** 2 + g.b ** 2 == pytest.approx(g.c ** 2)
    assert g.magnitude('ab') == pytest.approx(g.a * g.b)
    assert g.magnitude('1') == 1.0
    assert g.omega_power(20) == pytest.approx(1)
    assert g.omega_power(5) == pytest.approx(1j)
    assert g.c0() == pytest.approx(154.267, abs=1e-3)
    assert g.u36_invariant(math.pi) == pytest.approx(g.c0() - 6)


def test_bad_magnitude_tag():
    with pytest.raises(ValueError):
        GoldenConstants.magnitude('abd')


def test_loads_u36_token_and_sparse_lines():
    op = loads_u36("""
d 2
# token lines
1 1 1 1 0 a
1 2 1 2 5 ab
# a plain sparse line
2 1 2 1 0.5 0.0
""")
    g = GoldenConstants
    assert op.entry(1, 1, 1, 1) == pytest.approx(g.a)
    assert op.entry(1, 2, 1, 2) == pytest.approx(1j * g.a * g.b)
    assert op.entry(2, 1, 2, 1) == 0.5
    assert op.nnz == 3


def test_loads_u36_rejects_repeats():
    with pytest.raises(MatrixFormatError):
        loads_u36("d 2\n1 1 1 1 0 a\n1 1 1 1 3 b\n")


def test_check_u36_rejects_wrong_shapes(p9_op):
    with pytest.raises(GoldenDataError):
        check_u36(p9_op)
    with pytest.raises(GoldenDataError):
        check_u36(identity_gate(6))


def test_load_u36_missing_file(tmp_path):
    missing = str(tmp_path / "nope.txt")
    assert not u36_available(missing)
    with pytest.raises(GoldenDataError):
        load_u36(missing)


def test_load_u36_needs_a_source(monkeypatch):
    monkeypatch.delenv(U36_FILE_ENV_VAR, raising=False)
    set_u36_path(None)
    assert not u36_available()
    with pytest.raises(GoldenDataError, match="--u36-file"):
        load_u36()


def test_load_u36_checksum(tmp_path):
    filename = tmp_path / "fake.txt"
    filename.write_text("d 6\n1 1 1 1 0 c\n")
    with pytest.raises(GoldenDataError):
        load_u36(str(filename))
    op = load_u36(str(filename), check=False)
    assert op.nnz == 1


@pytest.mark.parametrize("fn, positions", [
    (d_theta, D_THETA_ROWS),
    (d_prime, (1, 2, 19, 20)),
    (d_double_prime, (1, 2, 7, 8)),
])
def test_phase_diagonals(fn, positions):
    theta = 0.4
    diag = np.diag(fn(theta))
    expected = np.ones(36, dtype=complex)
    expected[[p - 1 for p in positions]] = cmath.exp(0.4j)
    assert_allclose(diag, expected)


# =============================================================================
# Phase system on small operators
# =============================================================================

def test_phase_system_of_dense_qubit_unitary(rng):
    u = BipartiteOperator(haar_unitary(4, rng))
    system = build_phase_system(u, workers=3)
    assert system.nvars == 16
    # 6 row pairs x 3 column differences per frame
    assert system.counts() == {'U': 18, 'G': 18, 'R': 18}
    assert system.nrows == 54
    # the kernel is the local diagonal phases: 4d - 3 of them
    assert exact_rank(system) == 11
    assert len(nullspace_basis(system)) == 5


def test_phase_system_is_thread_count_independent(rng):
    u = BipartiteOperator(haar_unitary(4, rng))
    assert build_phase_system(u, workers=1).rows == \
        build_phase_system(u, workers=3).rows


def test_phase_system_of_permutation(p9_op):
    system = build_phase_system(p9_op)
    assert system.nvars == 9
    assert system.nrows == 0
    assert exact_rank(system) == 0
    assert len(nullspace_basis(system)) == 9


def test_enphase_solution_keeps_deficits(rng):
    u = BipartiteOperator(haar_unitary(4, rng))
    basis = nullspace_basis(build_phase_system(u))
    coeffs = rng.uniform(-math.pi, math.pi, len(basis))
    v = enphase_solution(u, coeffs, basis)
    assert_allclose(deficits_of(v), deficits_of(u), atol=1e-10)
    assert not v.allclose(u)


def test_enphase_solution_on_permutation(rng, p9_op):
    v = enphase_solution(p9_op, rng.uniform(-math.pi, math.pi, 9))
    assert classify(v, TOL).is_two_unitary
    assert_allclose(np.abs(v.matrix), np.abs(p9_op.matrix))


def test_enphase_solution_length_checks(p9_op):
    with pytest.raises(ValueError):
        enphase_solution(p9_op, [0.1, 0.2])
    with pytest.raises(ValueError):
        enphase_solution(p9_op, [0.1], basis=[[1, 0]])


def test_in_span():
    basis = [[1, 1, 0], [0, 1, 1]]
    ok, coeffs = in_span(basis, [1, 2, 1])
    assert ok and coeffs == [1, 1]
    ok, coeffs = in_span(basis, [1, 0, 0])
    assert not ok and coeffs is None


# =============================================================================
# U36 (needs the transcription)
# =============================================================================

@requires_u36
def test_u36_is_two_unitary():
    u = load_u36()
    assert u.d == 6
    assert u.nnz == 112
    assert classify(u, TOL).is_two_unitary


@requires_u36
@pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi])
def test_u36_theta_invariant(theta):
    u = u36_theta(theta)
    assert classify(u, TOL).is_two_unitary
    value = contract_invariant(u, canonical_n4_tuple())
    assert value.real == pytest.approx(GoldenConstants.u36_invariant(theta),
                                       rel=1e-6)


@requires_u36
def test_u36_theta_rearrangements():
    u = load_u36()
    theta = 0.9
    ut = u36_theta(theta, u)
    assert_allclose(realign(ut).matrix,
                    realign(u).matrix @ d_prime(theta), atol=1e-12)
    assert_allclose(partial_transpose(ut).matrix,
                    d_double_prime(theta) @ partial_transpose(u).matrix,
                    atol=1e-12)


@requires_u36
def test_u36_phase_system():
    u = load_u36()
    system = build_phase_system(u, workers=3)
    assert system.nvars == 112
    assert system.nrows == 246
    assert system.counts() == {'U': 75, 'G': 87, 'R': 84}
    assert exact_rank(system) == 87
    basis = nullspace_basis(system)
    assert len(basis) == 25
    ok, _ = in_span(basis, theta_direction(system))
    assert ok
    rng = np.random.default_rng(25)
    for _ in range(5):
        coeffs = rng.uniform(-math.pi, math.pi, len(basis))
        v = enphase_solution(u, coeffs, basis)
        assert classify(v, TOL).is_two_unitary

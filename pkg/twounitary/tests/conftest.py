#!/usr/bin/env python
# twounitary/tests/conftest.py

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

import os

import numpy as np
import pytest

from twounitary.constants import DATA_DIR
from twounitary.golden import u36_available
from twounitary.latin import p16
from twounitary.qutrit import p9
from twounitary.tensorcore import BipartiteOperator, haar_unitary

requires_u36 = pytest.mark.skipif(
    not u36_available(),
    reason="no U36 transcription (set TWOUNITARY_U36_FILE)")


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


def random_complex_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_unitary_operator(d: int,
                            rng: np.random.Generator) -> BipartiteOperator:
    return BipartiteOperator(haar_unitary(d * d, rng))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20230401)


@pytest.fixture
def p9_op() -> BipartiteOperator:
    return p9().operator


@pytest.fixture
def p16_op() -> BipartiteOperator:
    return p16().operator

#!/usr/bin/env python
# twounitary/constants.py

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
from twounitary.version import VERSION


ABOUT = """
twounitary {VERSION}

Construct, verify and classify 2-unitary operators and AME(4,d) states.

Functions:
  - realignment and partial transpose; dual / T-dual / 2-unitary tests
  - orthogonal (diagonal) Latin squares and their permutation gates
  - permutation-indexed local-unitary invariants and L[U] moments
  - constructive reduction of any two-qutrit 2-unitary to P9
  - the golden AME(4,6) operator, its theta family and phase system
  - seeded numerical search for 2-unitaries

Operators are exchanged as UTF-8 sparse text files (see doc/manual.rst).
Results can optionally be logged to a database; any backend supported by
SQLAlchemy will do ({BACKEND_URL}).

External libraries used include arrow; colorlog; NumPy; opt_einsum; SciPy;
SQLAlchemy.
""".format(
    VERSION=VERSION,
    BACKEND_URL="http://docs.sqlalchemy.org/en/latest/core/engines.html",
)

CURRENT_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(CURRENT_DIR, 'data')

DB_URL_ENV_VAR = 'TWOUNITARY_DATABASE_URL'
NUM_THREADS_ENV_VAR = 'TWOUNITARY_NUM_THREADS'
U36_FILE_ENV_VAR = 'TWOUNITARY_U36_FILE'

LOG_FORMAT = '%(asctime)s.%(msecs)03d:%(levelname)s:%(name)s:%(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'

# =============================================================================
# Numerical defaults
# =============================================================================

DEFAULT_TOLERANCE = 1e-10
STAGE_TOLERANCE = 1e-9
SUPPORT_TOLERANCE = 1e-12
U36_CHECKSUM_TOLERANCE = 1e-10
U36_NNZ = 112

CONTRACTION_BUDGET = 10 ** 9  # terms
CONTRACTION_CHUNK_TERMS = 2 ** 20  # array elements per worker chunk
DENSE_CHUNK_TERMS = 2 ** 18

PRODUCT_PAIR_MAX_ITER = 200
PRODUCT_PAIR_MAX_RESTARTS = 50
PRODUCT_PAIR_TOLERANCE = 1e-12

GENERATOR_MAX_ITER = 2000
GENERATOR_TOLERANCE = 1e-12
GENERATOR_STALL_WINDOW = 200
GENERATOR_STALL_RATIO = 1e-3

# =============================================================================
# Command-line exit codes
# =============================================================================

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

#!/usr/bin/env python
# twounitary/tests/test_matrixio.py

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

import io

import numpy as np
import pytest

from twounitary.latin import ODLS4_K, ODLS4_L, p16
from twounitary.matrixio import (
    MatrixFormatError,
    digest,
    dumps_operator,
    dumps_perm_rows,
    dumps_squares,
    loads_operator,
    loads_perm_rows,
    loads_squares,
    read_operator,
    tokenize_line,
    write_operator,
    write_operator_to,
)
from twounitary.qutrit import p9
from twounitary.tensorcore import BipartiteOperator, haar_unitary
from twounitary.tests.conftest import data_path


def test_tokenize_line_keeps_columns_and_drops_comments():
    assert tokenize_line("  1 22  3 # four") == [(3, "1"), (5, "22"),
                                                 (9, "3")]
    assert tokenize_line("# nothing") == []


def test_loads_operator_basic():
    op = loads_operator("""
# a comment
d 2
1 1 1 1 1.0 0.0
2 2 2 2 0.0 -1.0
1 2 2 1 0 0
""")
    assert op.d == 2
    assert op.nnz == 2  # explicit zeros are dropped
    assert op.entry(2, 2, 2, 2) == -1j


def test_packaged_files_match_builtins():
    assert read_operator(data_path("p9.mat")) == p9().operator
    assert read_operator(data_path("p16.mat")) == p16().operator
    with open(data_path("odls4.txt")) as f:
        k, l = loads_squares(f.read())
    assert k.tolist() == ODLS4_K
    assert l.tolist() == ODLS4_L


def test_written_operator_reads_back_exactly(tmp_path, rng):
    op = BipartiteOperator(haar_unitary(9, rng))
    filename = str(tmp_path / "u.mat")
    write_operator(op, filename, comment="random\nunitary")
    assert read_operator(filename) == op
    with open(filename) as f:
        assert f.readline() == "# random\n"


@pytest.mark.parametrize("text, line, col", [
    ("", None, None),
    ("x 3\n", 1, 1),
    ("d 1\n", 1, 3),
    ("d 2\n1 1 1 1 1.0\n", 2, 1),
    ("d 2\n1 1 1 3 1.0 0.0\n", 2, 7),
    ("d 2\n1 1 1 1 one 0.0\n", 2, 9),
    ("d 2\n1 1 1 1 1.0 0.0\n\n1 1 1 1 2.0 0.0\n", 4, 1),
])
def test_loads_operator_diagnostics(text, line, col):
    with pytest.raises(MatrixFormatError) as excinfo:
        loads_operator(text, "bad.mat")
    e = excinfo.value
    assert e.filename == "bad.mat"
    assert e.line == line
    assert e.col == col
    assert str(e).startswith("bad.mat")


def test_matrix_format_error_is_value_error():
    assert issubclass(MatrixFormatError, ValueError)


def test_dumps_operator_lists_entries_in_order():
    text = dumps_operator(p9().operator)
    lines = text.splitlines()
    assert lines[0] == "d 3"
    assert lines[1] == "1 1 1 1 1.0 0.0"
    assert len(lines) == 10


def test_write_operator_to_stream():
    buf = io.StringIO()
    write_operator_to(p9().operator, buf, comment="p9")
    assert buf.getvalue() == dumps_operator(p9().operator, "p9")
    assert loads_operator(buf.getvalue()) == p9().operator


def test_squares_format():
    text = dumps_squares([np.array(ODLS4_K), np.array(ODLS4_L)])
    assert text.startswith("d 4\n1 3 4 2\n")
    assert "\n\n2 3 1 4\n" in text
    k, l = loads_squares(text)
    assert k.tolist() == ODLS4_K


@pytest.mark.parametrize("text", [
    "d 3\n1 2 3\n2 3 1\n",  # short block
    "d 3\n1 2 3\n2 3\n3 1 2\n",  # short row
    "d 3\n1 2 4\n2 3 1\n3 1 2\n",  # symbol out of range
    "d 3\n",  # nothing
])
def test_loads_squares_rejects(text):
    with pytest.raises(MatrixFormatError):
        loads_squares(text)


def test_perm_rows():
    rows = [[1, 2, 3, 4], [2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]]
    text = dumps_perm_rows(rows)
    assert loads_perm_rows("# n = 4\n" + text) == rows
    with pytest.raises(MatrixFormatError):
        loads_perm_rows("1 2\n2 1\n")


def test_digest():
    assert digest(b"") == (
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855")

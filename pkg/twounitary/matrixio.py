#!/usr/bin/env python
# twounitary/matrixio.py

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

Text formats.

Sparse operator::

    d 3
    # i j k l re im   (1-based)
    1 1 1 1 1.0 0.0

Latin square (an OLS pair is two such blocks separated by a blank line)::

    d 3
    1 2 3
    2 3 1
    3 1 2

Permutation tuple: four lines of space-separated images.
"""

import hashlib
import logging
from typing import Iterator, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from twounitary.tensorcore import BipartiteOperator, Entry

log = logging.getLogger(__name__)

Token = Tuple[int, str]  # (1-based column, text)


class MatrixFormatError(ValueError):
    def __init__(self, message: str, filename: str = "<string>",
                 line: Optional[int] = None,
                 col: Optional[int] = None) -> None:
        self.filename = filename
        self.line = line
        self.col = col
        where = filename
        if line is not None:
            where += ":{}".format(line)
            if col is not None:
                where += ":{}".format(col)
        super().__init__("{}: {}".format(where, message))


# =============================================================================
# Tokenizing
# =============================================================================

def tokenize_line(text: str) -> List[Token]:
    """Split on whitespace, remembering 1-based columns; drop # comments."""
    text = text.split('#', 1)[0]
    tokens = []
    col = 0
    for part in text.split():
        col = text.index(part, col)
        tokens.append((col + 1, part))
        col += len(part)
    return tokens


def iter_lines(text: str) -> Iterator[Tuple[int, List[Token]]]:
    """(line number, tokens) for every line, blank ones included."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        yield lineno, tokenize_line(line)


def parse_int(token: Token, filename: str, lineno: int) -> int:
    col, s = token
    try:
        return int(s)
    except ValueError:
        raise MatrixFormatError("expected an integer, got {!r}".format(s),
                                filename, lineno, col)


def parse_float(token: Token, filename: str, lineno: int) -> float:
    col, s = token
    try:
        return float(s)
    except ValueError:
        raise MatrixFormatError("expected a number, got {!r}".format(s),
                                filename, lineno, col)


def parse_header(lines: Sequence[Tuple[int, List[Token]]],
                 filename: str) -> Tuple[int, int]:
    """
    Returns (d, index of the first line after the header). The header is the
    first non-blank line and must read "d <int>".
    """
    for idx, (lineno, tokens) in enumerate(lines):
        if not tokens:
            continue
        if len(tokens) != 2 or tokens[0][1] != 'd':
            raise MatrixFormatError("expected header 'd <int>'",
                                    filename, lineno, tokens[0][0])
        d = parse_int(tokens[1], filename, lineno)
        if d < 2:
            raise MatrixFormatError("d must be >= 2, got {}".format(d),
                                    filename, lineno, tokens[1][0])
        return d, idx + 1
    raise MatrixFormatError("empty file", filename)


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# =============================================================================
# Sparse operators
# =============================================================================

def parse_index_quadruple(tokens: List[Token], d: int, filename: str,
                          lineno: int) -> Tuple[int, int, int, int]:
    idx = []
    for token in tokens[:4]:
        v = parse_int(token, filename, lineno)
        if not 1 <= v <= d:
            raise MatrixFormatError(
                "index {} outside [1, {}]".format(v, d),
                filename, lineno, token[0])
        idx.append(v)
    return tuple(idx)


def loads_operator(text: str, filename: str = "<string>") -> BipartiteOperator:
    lines = list(iter_lines(text))
    d, start = parse_header(lines, filename)
    entries = []  # type: List[Entry]
    seen = {}
    for lineno, tokens in lines[start:]:
        if not tokens:
            continue
        if len(tokens) != 6:
            raise MatrixFormatError(
                "expected 'i j k l re im', got {} fields".format(len(tokens)),
                filename, lineno, tokens[0][0])
        i, j, k, l = parse_index_quadruple(tokens, d, filename, lineno)
        re = parse_float(tokens[4], filename, lineno)
        im = parse_float(tokens[5], filename, lineno)
        if (i, j, k, l) in seen:
            raise MatrixFormatError(
                "entry ({}, {}, {}, {}) repeats line {}".format(
                    i, j, k, l, seen[(i, j, k, l)]),
                filename, lineno, tokens[0][0])
        seen[(i, j, k, l)] = lineno
        if re != 0 or im != 0:
            entries.append((i, j, k, l, complex(re, im)))
    log.debug("Read operator d={} with {} nonzeros from {}".format(
        d, len(entries), filename))
    return BipartiteOperator.from_entries(d, entries)


def read_operator(filename: str) -> BipartiteOperator:
    with open(filename, encoding='utf-8') as f:
        return loads_operator(f.read(), filename)


def dumps_operator(op: BipartiteOperator, comment: str = "") -> str:
    out = []
    if comment:
        out.extend("# " + line for line in comment.splitlines())
    out.append("d {}".format(op.d))
    for i, j, k, l, v in op.entries():
        out.append("{} {} {} {} {!r} {!r}".format(
            i, j, k, l, float(v.real), float(v.imag)))
    return "\n".join(out) + "\n"


def write_operator(op: BipartiteOperator, filename: str,
                   comment: str = "") -> None:
    with open(filename, 'w', encoding='utf-8') as f:
        write_operator_to(op, f, comment)


def write_operator_to(op: BipartiteOperator, f: TextIO,
                      comment: str = "") -> None:
    f.write(dumps_operator(op, comment))


# =============================================================================
# Latin squares
# =============================================================================

def loads_squares(text: str,
                  filename: str = "<string>") -> List[np.ndarray]:
    """One or more d x d integer arrays, blocks separated by blank lines."""
    lines = list(iter_lines(text))
    d, start = parse_header(lines, filename)
    squares = []
    block = []  # type: List[List[int]]
    for lineno, tokens in lines[start:] + [(len(lines) + 1, [])]:
        if not tokens:
            if block:
                if len(block) != d:
                    raise MatrixFormatError(
                        "square has {} rows, expected {}".format(
                            len(block), d),
                        filename, lineno)
                squares.append(np.array(block, dtype=int))
                block = []
            continue
        if len(tokens) != d:
            raise MatrixFormatError(
                "row has {} cells, expected {}".format(len(tokens), d),
                filename, lineno, tokens[0][0])
        row = []
        for token in tokens:
            v = parse_int(token, filename, lineno)
            if not 1 <= v <= d:
                raise MatrixFormatError(
                    "symbol {} outside [1, {}]".format(v, d),
                    filename, lineno, token[0])
            row.append(v)
        block.append(row)
    if not squares:
        raise MatrixFormatError("no square found", filename)
    return squares


def dumps_squares(squares: Sequence[np.ndarray]) -> str:
    d = squares[0].shape[0]
    blocks = [
        "\n".join(" ".join(str(int(x)) for x in row) for row in sq)
        for sq in squares
    ]
    return "d {}\n".format(d) + "\n\n".join(blocks) + "\n"


# =============================================================================
# Permutation tuples
# =============================================================================

def loads_perm_rows(text: str,
                    filename: str = "<string>") -> List[List[int]]:
    rows = []
    for lineno, tokens in iter_lines(text):
        if not tokens:
            continue
        rows.append([parse_int(t, filename, lineno) for t in tokens])
    if len(rows) != 4:
        raise MatrixFormatError(
            "expected 4 permutation lines, got {}".format(len(rows)),
            filename)
    return rows


def dumps_perm_rows(rows: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(str(x) for x in row) + "\n" for row in rows)

#!/usr/bin/env python
# twounitary/tests/test_main.py

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
import json
import math

import pytest

from twounitary.constants import EXIT_FAILURE, EXIT_SUCCESS, EXIT_USAGE
from twounitary.golden import u36_available
from twounitary.main import construct_operator, load_operator, run
from twounitary.matrixio import loads_squares, read_operator
from twounitary.models import RunRecord, session_scope
from twounitary.settings import set_database_url
from twounitary.tests.conftest import data_path


@pytest.fixture(autouse=True)
def no_ledger():
    yield
    set_database_url(None)


def test_verify_packaged_p9():
    code, report = run(["verify", data_path("p9.mat"), "--tol", "1e-10"])
    assert code == EXIT_SUCCESS
    assert report.verdict is True
    assert report.results['is_two_unitary'] is True
    assert report.inputs[data_path("p9.mat")]


def test_verify_failure_exit_code():
    code, report = run(["verify", "builtin:swap:2"])
    assert code == EXIT_FAILURE
    assert report.results['is_dual'] is True
    assert report.as_dict()['verdict'] == 'fail'


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["verify"],
    ["verify", "builtin:p9", "--tol", "small"],
])
def test_usage_errors(argv):
    code, report = run(argv)
    assert code == EXIT_USAGE
    assert report is None


def test_input_errors(tmp_path):
    bad = tmp_path / "bad.mat"
    bad.write_text("d 3\n1 1 1 4 1.0 0.0\n")
    code, report = run(["verify", str(bad)])
    assert code == EXIT_USAGE
    assert "bad.mat:2:7" in report.results['error']
    code, _ = run(["verify", str(tmp_path / "missing.mat")])
    assert code == EXIT_USAGE
    code, _ = run(["verify", "builtin:odls:6"])
    assert code == EXIT_USAGE


def test_invariant_of_p16_theta():
    code, report = run(["invariant", data_path("p16.mat"),
                        "--theta", repr(math.pi), "--perms", "builtin:n4"])
    assert code == EXIT_SUCCESS
    assert report.verdict is None
    assert report.results['value'].real == pytest.approx(208, abs=1e-6)
    assert report.results['latin_rectangle'] is True


def test_invariant_with_perm_file(tmp_path):
    perms = tmp_path / "perms.txt"
    perms.write_text("1 2 3 4\n2 1 4 3\n3 4 1 2\n4 3 2 1\n")
    code, report = run(["invariant", "builtin:p16", "--perms", str(perms),
                        "--method", "network"])
    assert code == EXIT_SUCCESS
    assert report.results['value'].real == pytest.approx(256, abs=1e-6)


def test_moment():
    code, report = run(["moment", "builtin:p16", "-k", "1", "--all-frames"])
    assert code == EXIT_SUCCESS
    for frame in ('U', 'R', 'G'):
        assert report.results['moments'][frame] == pytest.approx(16)


def test_construct_round_trip(tmp_path):
    out = str(tmp_path / "odls5.mat")
    code, report = run(["construct", "odls:5", "--out", out])
    assert code == EXIT_SUCCESS
    assert report.results['is_two_unitary'] is True
    assert read_operator(out).nnz == 25
    code, report = run(["verify", out])
    assert code == EXIT_SUCCESS


def test_construct_squares(tmp_path):
    out = tmp_path / "odls4.txt"
    code, report = run(["construct", "odls:4", "--squares", "--out",
                        str(out)])
    assert code == EXIT_SUCCESS
    assert report.results['diagonal'] is True
    k, l = loads_squares(out.read_text())
    assert k.shape == (4, 4)


def test_construct_to_stdout(capsys):
    stdout = io.StringIO()
    code, report = run(["construct", "p9"], stdout=stdout)
    assert code == EXIT_SUCCESS
    assert capsys.readouterr().out.startswith("# p9\nd 3\n")
    assert stdout.getvalue() == ""


@pytest.mark.skipif(u36_available(), reason="U36 transcription present")
def test_construct_u36_without_data():
    code, report = run(["construct", "u36"])
    assert code == EXIT_USAGE
    assert "U36" in report.results['error']


def test_enphase_permutation(tmp_path):
    out = str(tmp_path / "p16x.mat")
    code, report = run(["enphase", "builtin:p16", "--seed", "3",
                        "--out", out])
    assert code == EXIT_SUCCESS
    assert report.results['mode'] == 'permutation'
    assert read_operator(out).nnz == 16
    code, report = run(["enphase", "builtin:p16", "--cell", "1", "1",
                        "--theta", "0.5"])
    assert code == EXIT_SUCCESS


def test_enphase_is_seeded():
    _, a = run(["enphase", "builtin:p9", "--seed", "9", "--json"])
    _, b = run(["enphase", "builtin:p9", "--seed", "9"])
    assert a.results['deficit_g'] == b.results['deficit_g']


def test_phases(tmp_path):
    basis_out = tmp_path / "basis.txt"
    code, report = run(["phases", "builtin:p9", "--basis-out",
                        str(basis_out)])
    assert code == EXIT_SUCCESS
    assert report.results['equations'] == 0
    assert report.results['nullity'] == 9
    assert len(basis_out.read_text().splitlines()) == 9


def test_reduce_p9():
    code, report = run(["reduce", "builtin:p9", "--seed", "1"])
    assert code == EXIT_SUCCESS
    assert report.results['residual'] < 1e-8


def test_generate_writes_output_and_ledger(tmp_path):
    out = str(tmp_path / "gen.mat")
    url = "sqlite:///{}".format(tmp_path / "runs.sqlite")
    code, report = run(["generate", "-d", "2", "--seed", "4",
                        "--max-iter", "3", "--out", out, "--dburl", url])
    assert code == EXIT_FAILURE
    assert report.results['converged'] is False
    assert read_operator(out).d == 2
    with session_scope(url) as session:
        records = session.query(RunRecord).all()
        assert [(r.command, r.seed, r.iterations) for r in records] == [
            ('generate', 4, 3)]


def test_state():
    code, report = run(["state", "builtin:p9"])
    assert code == EXIT_SUCCESS
    assert report.results['norm'] == pytest.approx(1)
    code, report = run(["state", "builtin:swap:3"])
    assert code == EXIT_FAILURE


def test_json_output():
    stdout = io.StringIO()
    code, _ = run(["verify", "builtin:p9", "--json"], stdout=stdout)
    assert code == EXIT_SUCCESS
    parsed = json.loads(stdout.getvalue())
    assert parsed['verdict'] == 'pass'
    assert parsed['command'] == 'verify'


def test_text_output():
    stdout = io.StringIO()
    run(["verify", "builtin:cnot"], stdout=stdout)
    assert 'verdict: "fail"' in stdout.getvalue().splitlines()


def test_builtins():
    assert construct_operator("identity:3").d == 3
    assert construct_operator("ols:3").nnz == 9
    with pytest.raises(ValueError):
        construct_operator("swap")
    with pytest.raises(ValueError):
        construct_operator("nothing")
    op, digest = load_operator("builtin:p9")
    assert len(digest) == 64

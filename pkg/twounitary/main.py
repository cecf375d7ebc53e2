#!/usr/bin/env python
# twounitary/main.py

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

import argparse
import cmath
import logging
import math
import sys
import traceback
from typing import List, Optional, TextIO, Tuple

import colorlog
import numpy as np

from twounitary.constants import (
    DB_URL_ENV_VAR,
    DEFAULT_TOLERANCE,
    EXIT_FAILURE,
    EXIT_SUCCESS,
    EXIT_USAGE,
    GENERATOR_MAX_ITER,
    GENERATOR_TOLERANCE,
    LOG_DATEFMT,
    LOG_FORMAT,
    NUM_THREADS_ENV_VAR,
    STAGE_TOLERANCE,
    U36_FILE_ENV_VAR,
)
from twounitary import golden, invariants, latin, matrixio, qutrit
from twounitary.generator import search_two_unitary
from twounitary.models import CommandReport, RunRecord, session_scope
from twounitary.settings import (
    get_database_settings,
    get_database_url,
    get_num_threads,
    set_database_echo,
    set_database_url,
    set_num_threads,
    set_u36_path,
)
from twounitary.tensorcore import (
    BipartiteOperator,
    Bipartition,
    classify,
    cnot_gate,
    from_dense,
    identity_gate,
    is_uniform_spectrum,
    marginal_spectrum,
    swap_gate,
    to_dense,
    vectorize,
)
from twounitary.version import VERSION

log = logging.getLogger(__name__)

BUILTIN_PREFIX = 'builtin:'


# =============================================================================
# Logging
# =============================================================================

def configure_logger_for_colour(logger: logging.Logger) -> None:
    handler = colorlog.StreamHandler()
    handler.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s' + LOG_FORMAT,
        datefmt=LOG_DATEFMT,
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'bold_red',
        }))
    logger.handlers = [handler]


def copy_root_log_to_file(filename: str) -> None:
    handler = logging.FileHandler(filename, encoding='utf-8')
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
    logging.getLogger().addHandler(handler)


def configure_logging(verbose: int, logfile: Optional[str]) -> None:
    loglevel = logging.DEBUG if verbose >= 1 else logging.INFO
    logging.basicConfig(format=LOG_FORMAT, datefmt=LOG_DATEFMT,
                        level=loglevel)
    rootlogger = logging.getLogger()
    rootlogger.setLevel(logging.DEBUG if verbose >= 2 else logging.INFO)
    configure_logger_for_colour(rootlogger)
    logging.getLogger('twounitary').setLevel(loglevel)
    if logfile:
        copy_root_log_to_file(logfile)


# =============================================================================
# Inputs
# =============================================================================

def construct_operator(what: str) -> BipartiteOperator:
    """
    p9, p16, u36, cnot, swap:<d>, identity:<d>, odls:<d>, ols:<d>.
    """
    name, _, arg = what.partition(':')
    if name == 'p9':
        return qutrit.p9().operator
    if name == 'p16':
        return latin.p16().operator
    if name == 'u36':
        return golden.load_u36()
    if name == 'cnot':
        return cnot_gate()
    if name in ('swap', 'identity', 'odls', 'ols'):
        try:
            d = int(arg)
        except ValueError:
            raise ValueError("{} needs an order, e.g. {}:4".format(name, name))
        if name == 'swap':
            return swap_gate(d)
        if name == 'identity':
            return identity_gate(d)
        pair = latin.construct_odls(d) if name == 'odls' \
            else latin.construct_ols(d)
        return latin.gate_from_ols(pair).operator
    raise ValueError("Unknown construction {!r}".format(what))


def load_operator(source: str) -> Tuple[BipartiteOperator, str]:
    """A file name or builtin:<construction>; returns (operator, digest)."""
    if source.startswith(BUILTIN_PREFIX):
        op = construct_operator(source[len(BUILTIN_PREFIX):])
        return op, matrixio.digest(to_dense(op).tobytes())
    with open(source, 'rb') as f:
        data = f.read()
    text = data.decode('utf-8')
    try:
        op = matrixio.loads_operator(text, source)
    except matrixio.MatrixFormatError:
        # magnitude-tag files (U36 transcriptions)
        op = golden.loads_u36(text, source)
    return op, matrixio.digest(data)


def load_perms(source: str) -> invariants.PermTuple:
    if source == BUILTIN_PREFIX + 'n4':
        return invariants.canonical_n4_tuple()
    with open(source, encoding='utf-8') as f:
        rows = matrixio.loads_perm_rows(f.read(), source)
    return invariants.PermTuple(*rows)


def apply_theta(op: BipartiteOperator, theta: Optional[float],
                family: str) -> BipartiteOperator:
    """
    family 'cell11' multiplies row (1, 1) by exp(i theta), which turns P16
    into P16(theta); 'u36' applies the diagonal of the golden family.
    """
    if theta is None:
        return op
    if family == 'u36':
        return golden.u36_theta(theta, op)
    m = to_dense(op)
    m[0, :] *= cmath.exp(1j * theta)
    return from_dense(m)


def record_run(report: CommandReport, **kwargs) -> None:
    url = get_database_url()
    if not url:
        return
    with session_scope(url, echo=get_database_settings()['echo']) as session:
        RunRecord.record_run(session, report, **kwargs)


# =============================================================================
# Commands
# =============================================================================

def cmd_verify(args: argparse.Namespace, report: CommandReport) -> None:
    op, report.inputs[args.file] = load_operator(args.file)
    result = classify(op, args.tol)
    report.results.update(result.as_dict())
    report.results['d'] = op.d
    report.results['nnz'] = op.nnz
    report.verdict = result.is_two_unitary


def cmd_invariant(args: argparse.Namespace, report: CommandReport) -> None:
    op, report.inputs[args.file] = load_operator(args.file)
    op = apply_theta(op, args.theta, args.family)
    perms = load_perms(args.perms)
    value = invariants.contract_invariant(op, perms, method=args.method)
    report.results.update({
        'value': value,
        'n': perms.n,
        'perms': [list(r) for r in perms.rows],
        'latin_rectangle': perms.latin_rectangle,
        'theta': args.theta,
        'method': args.method,
    })


def cmd_moment(args: argparse.Namespace, report: CommandReport) -> None:
    op, report.inputs[args.file] = load_operator(args.file)
    op = apply_theta(op, args.theta, args.family)
    if args.all_frames:
        report.results['moments'] = invariants.rearrangement_moments(
            op, args.k)
    else:
        report.results['value'] = invariants.moment(op, args.k)
    report.results['k'] = args.k


def cmd_reduce(args: argparse.Namespace, report: CommandReport) -> None:
    op, report.inputs[args.file] = load_operator(args.file)
    report.tolerances['stage'] = args.stage_tol
    try:
        f = qutrit.reduce_to_p9(op, seed=args.seed, tol=args.tol,
                                stage_tol=args.stage_tol)
    except (qutrit.NoProductPairError, qutrit.ZeroPatternError) as e:
        log.error(str(e))
        report.results['error'] = str(e)
        report.verdict = False
        record_run(report, d=op.d, seed=args.seed)
        return
    report.results.update(f.as_dict())
    report.verdict = qutrit.verify_factorization(op, f, args.tol)
    record_run(report, d=op.d, seed=args.seed, residual=f.residual)


def cmd_construct(args: argparse.Namespace, report: CommandReport) -> None:
    if args.squares:
        name, _, arg = args.what.partition(':')
        if name not in ('odls', 'ols'):
            raise ValueError("--squares needs odls:<d> or ols:<d>")
        pair = latin.construct_odls(int(arg)) if name == 'odls' \
            else latin.construct_ols(int(arg))
        text = matrixio.dumps_squares([pair.k.cells, pair.l.cells])
        report.results['diagonal'] = pair.diagonal_flag
    else:
        op = construct_operator(args.what)
        text = matrixio.dumps_operator(op, comment=args.what)
        report.results.update(classify(op, args.tol).as_dict())
        report.results['nnz'] = op.nnz
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as f:
            f.write(text)
        report.results['out'] = args.out
    else:
        sys.stdout.write(text)
        report.results['out'] = '-'


def cmd_enphase(args: argparse.Namespace, report: CommandReport) -> None:
    op, report.inputs[args.file] = load_operator(args.file)
    rng = np.random.default_rng(args.seed)
    if latin.is_permutation_operator(op):
        gate = latin.gate_from_operator(op)
        if args.cell:
            phases = {tuple(args.cell): cmath.exp(1j * args.theta)}
        else:
            phases = latin.random_phases(gate, rng)
        out = latin.enphase(gate, phases)
        report.results['mode'] = 'permutation'
    else:
        system = golden.build_phase_system(op, workers=get_num_threads())
        basis = golden.nullspace_basis(system)
        coeffs = rng.uniform(-math.pi, math.pi, len(basis))
        out = golden.enphase_solution(op, coeffs, basis)
        report.results['mode'] = 'phase_system'
        report.results['nullity'] = len(basis)
    result = classify(out, args.tol)
    report.results.update(result.as_dict())
    report.verdict = result.is_two_unitary
    if args.out:
        matrixio.write_operator(out, args.out)
        report.results['out'] = args.out


def cmd_phases(args: argparse.Namespace, report: CommandReport) -> None:
    op, report.inputs[args.file] = load_operator(args.file)
    system = golden.build_phase_system(op, workers=get_num_threads())
    rank = golden.exact_rank(system)
    report.results.update({
        'variables': system.nvars,
        'equations': system.nrows,
        'by_frame': system.counts(),
        'rank': rank,
        'nullity': system.nvars - rank,
    })
    if args.basis_out:
        basis = golden.nullspace_basis(system)
        with open(args.basis_out, 'w', encoding='utf-8') as f:
            for row in basis:
                f.write(" ".join(str(x) for x in row) + "\n")
        report.results['basis_out'] = args.basis_out


def cmd_generate(args: argparse.Namespace, report: CommandReport) -> None:
    result = search_two_unitary(args.d, args.seed, max_iter=args.max_iter,
                                tol=args.gen_tol, order=args.order)
    u, r, g = result.final_deficits
    report.tolerances['generator'] = args.gen_tol
    report.results.update({
        'd': args.d,
        'seed': args.seed,
        'iterations': result.iterations,
        'converged': result.converged,
        'stalled': result.stalled,
        'deficit_u': u,
        'deficit_r': r,
        'deficit_g': g,
    })
    report.verdict = result.converged
    if args.out:
        matrixio.write_operator(
            result.u, args.out,
            comment="generate d={} seed={}".format(args.d, args.seed))
        report.results['out'] = args.out
    record_run(report, d=args.d, seed=args.seed,
               iterations=result.iterations,
               deficit_u=u, deficit_r=r, deficit_g=g)


def cmd_state(args: argparse.Namespace, report: CommandReport) -> None:
    op, report.inputs[args.file] = load_operator(args.file)
    psi = vectorize(op)
    report.results['norm'] = psi.norm()
    report.results['nnz'] = psi.nnz
    uniform = True
    for b in Bipartition:
        spectrum = marginal_spectrum(psi, b)
        report.results[b.value] = spectrum
        uniform = uniform and is_uniform_spectrum(spectrum, args.tol)
    report.verdict = uniform


COMMANDS = {
    'verify': cmd_verify,
    'invariant': cmd_invariant,
    'moment': cmd_moment,
    'reduce': cmd_reduce,
    'construct': cmd_construct,
    'enphase': cmd_enphase,
    'phases': cmd_phases,
    'generate': cmd_generate,
    'state': cmd_state,
}


# =============================================================================
# Argument parsing
# =============================================================================

def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--logfile", default=None,
                        help="Filename to append log to")
    common.add_argument('--verbose', '-v', action='count', default=0,
                        help="Be verbose (use twice for extra verbosity)")
    common.add_argument('--json', action='store_true',
                        help="Emit the report as JSON")
    common.add_argument('--tol', type=float, default=DEFAULT_TOLERANCE,
                        help="Tolerance for verdicts (default %(default)s)")
    common.add_argument(
        '--threads', type=int, default=None,
        help="Worker threads (default: {} environment variable, else CPU "
        "count)".format(NUM_THREADS_ENV_VAR))
    common.add_argument(
        "--dburl", default=None,
        help="Database URL for the run ledger (if not specified, looks in "
        "{} environment variable; no ledger if neither)".format(
            DB_URL_ENV_VAR))
    common.add_argument('--dbecho', action="store_true",
                        help="Echo SQL to log.")
    common.add_argument(
        '--u36-file', default=None,
        help="U36 transcription file (else the {} environment variable; "
        "no U36 data ships with the package)".format(U36_FILE_ENV_VAR))

    parser = argparse.ArgumentParser(
        description="twounitary v{}. Construct, verify and classify "
        "2-unitary operators and AME(4,d) states.".format(VERSION))
    parser.add_argument('--version', action='version',
                        version="%(prog)s {}".format(VERSION))
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_, parents=[common])

    source_help = "Operator file, or builtin:p9 / p16 / u36 / odls:<d> / ..."

    p = add('verify', "Unitarity, dual and T-dual deficits")
    p.add_argument('file', help=source_help)

    p = add('invariant', "Permutation-indexed LU invariant")
    p.add_argument('file', help=source_help)
    p.add_argument('--perms', default=BUILTIN_PREFIX + 'n4',
                   help="Permutation file, or builtin:n4 (default)")
    p.add_argument('--theta', type=float, default=None,
                   help="Enphase before contracting (see --family)")
    p.add_argument('--family', choices=['cell11', 'u36'], default='cell11',
                   help="Which theta family (default %(default)s)")
    p.add_argument('--method', choices=invariants.METHODS, default='auto')

    p = add('moment', "Tr L[U]^k")
    p.add_argument('file', help=source_help)
    p.add_argument('-k', type=int, default=2)
    p.add_argument('--theta', type=float, default=None)
    p.add_argument('--family', choices=['cell11', 'u36'], default='cell11')
    p.add_argument('--all-frames', action='store_true',
                   help="Also the moments of U^R and U^Gamma")

    p = add('reduce', "Local unitaries taking a qutrit 2-unitary to P9")
    p.add_argument('file', help=source_help)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--stage-tol', type=float, default=STAGE_TOLERANCE)

    p = add('construct', "Write a named operator (or Latin squares)")
    p.add_argument('what', help="p9, p16, u36, cnot, swap:<d>, "
                   "identity:<d>, odls:<d>, ols:<d>")
    p.add_argument('--out', default=None, help="Output file (default stdout)")
    p.add_argument('--squares', action='store_true',
                   help="Write the Latin squares instead of the gate")

    p = add('enphase', "Random 2-unitary enphasing")
    p.add_argument('file', help=source_help)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--cell', type=int, nargs=2, metavar=('I', 'J'),
                   help="Permutations: enphase only this row cell")
    p.add_argument('--theta', type=float, default=0.0)
    p.add_argument('--out', default=None)

    p = add('phases', "Homogeneous phase system: counts, rank, nullity")
    p.add_argument('file', help=source_help)
    p.add_argument('--basis-out', default=None,
                   help="Write the integer kernel basis, one row per line")

    p = add('generate', "Seeded search for a 2-unitary")
    p.add_argument('-d', type=int, default=3)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--max-iter', type=int, default=GENERATOR_MAX_ITER)
    p.add_argument('--gen-tol', type=float, default=GENERATOR_TOLERANCE,
                   help="Convergence tolerance (default %(default)s)")
    p.add_argument('--order', choices=['fixed', 'random'], default='fixed')
    p.add_argument('--out', default=None)

    p = add('state', "AME check of the vectorized operator")
    p.add_argument('file', help=source_help)
    return parser


# =============================================================================
# Main
# =============================================================================

def run(argv: List[str],
        stdout: Optional[TextIO] = None,
        configure: bool = False) -> Tuple[int, Optional[CommandReport]]:
    """
    Parse, execute, and (if stdout is given) print the report. Returns the
    exit code and the report (None if the arguments did not parse).
    """
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (EXIT_SUCCESS if e.code == 0 else EXIT_USAGE), None
    if configure:
        configure_logging(args.verbose, args.logfile)
    if args.dburl:
        set_database_url(args.dburl)
    if args.dbecho:
        set_database_echo(True)
    set_num_threads(args.threads)
    set_u36_path(args.u36_file)
    report = CommandReport(args.command, argv)
    report.tolerances['tol'] = args.tol
    log.debug("args: {}".format(args))
    try:
        COMMANDS[args.command](args, report)
        code = EXIT_FAILURE if report.verdict is False else EXIT_SUCCESS
    except (ValueError, OSError) as e:
        log.error("{}: {}".format(type(e).__name__, e))
        report.results['error'] = str(e)
        code = EXIT_USAGE
    report.finish()
    if stdout is not None and report.results.get('out') != '-':
        stdout.write(report.to_json() + "\n" if args.json
                     else report.to_text())
    return code, report


def main() -> int:
    # noinspection PyBroadException
    try:
        code, _ = run(sys.argv[1:], stdout=sys.stdout, configure=True)
    except Exception as e:
        log.critical("Uncaught exception: {}".format(e))
        log.critical(traceback.format_exc())
        code = EXIT_FAILURE
    return code


# =============================================================================
# Command-line entry point
# =============================================================================

if __name__ == '__main__':
    sys.exit(main())

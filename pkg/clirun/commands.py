"""
Command-line subcommands
Each cmd_* takes parsed arguments and returns an exit code from EXIT_CODES
"""

import argparse
import json
from typing import List, Optional, Sequence
from config.env_loader import validate_environment
from config.settings import (
    ENUMERATION_CONFIG, EXIT_CODES, EXPERIMENT_CONFIG, TNCORE_CONFIG, VERIFY_CONFIG,
)
from equilearn.experiment import ConstitutiveExperiment, TrainConfig
from equilearn.model import VARIANTS
from equivar.basis import describe_element, equivariant_basis
from invgen.generators import enumerate_networks, span_dimensions
from invgen.signature import parse_signature, parse_slot
from so3rep.clebsch import cg, change_of_basis_O
from so3rep.projectors import projector
from utils.errors import (
    EnumerationTooLarge, So3TenGenError, TrainingDiverged,
)
from utils.logger import get_logger, setup_logging, CROSS, WARNING
from clirun.io import atomic_write_json, load_document, tensor_document
from clirun.report import verify

logger = get_logger(__name__)


def _train_sizes(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("no train sizes given")
    return sizes


def cmd_enumerate(args: argparse.Namespace) -> int:
    """Write the generator set of a signature and print the count per degree"""
    sig = parse_signature(args.signature)
    gen_set = enumerate_networks(
        sig, args.degree, epsilon_budget=args.epsilon, seed=args.seed, workers=args.jobs,
    )
    atomic_write_json(args.out, gen_set.to_dict())
    print(f"{sig}: {len(gen_set)} generators -> {args.out}")
    for degree, count in span_dimensions(gen_set).items():
        print(f"  degree {degree}: {count}")
    return EXIT_CODES['ok']


def cmd_basis(args: argparse.Namespace) -> int:
    """Write the equivariant basis sig -> out_rep and print a formula sketch per element"""
    sig = parse_signature(args.signature)
    out_rep = parse_slot(args.out_rep)
    basis = equivariant_basis(
        sig, out_rep, args.degree, epsilon_budget=args.epsilon, seed=args.seed, workers=args.jobs,
    )
    atomic_write_json(args.out, basis.to_dict())
    print(f"{sig} -> {out_rep}: {len(basis)} elements -> {args.out}")
    for k, e in enumerate(basis):
        print(f"  [{k}] {describe_element(e)}")
    return EXIT_CODES['ok']


def cmd_verify(args: argparse.Namespace) -> int:
    """
    Monte-Carlo check of a generator set or basis file

    Prints the VerificationReport JSON (and writes it to --report when given);
    exit 0 when every item passes, 1 otherwise.
    """
    if args.rotations < 1:
        logger.error(f"{CROSS} --rotations must be at least 1, got {args.rotations}")
        return EXIT_CODES['usage']
    doc = load_document(args.input)
    report = verify(doc, args.rotations, args.tol, args.seed, args.jobs)
    text = report.to_dict()
    if args.report:
        atomic_write_json(args.report, text)
    print(json.dumps(text, indent=TNCORE_CONFIG['json_indent']))
    return EXIT_CODES['ok'] if report.passed else EXIT_CODES['verification_failed']


def cmd_experiment(args: argparse.Namespace) -> int:
    """Run the constitutive-law training grid and write runs.csv and aggregate.csv"""
    cfg = TrainConfig().with_overrides(
        variant=args.variant,
        train_sizes=args.train_sizes,
        seed=args.seed,
        runs=args.runs,
        law=args.law,
        val_size=args.val_size,
        test_size=args.test_size,
        epochs_small=args.epochs_small,
        epochs_large=args.epochs_large,
        workers=args.jobs,
    )
    metrics = ConstitutiveExperiment(cfg, args.out).run()
    for row in metrics.aggregate.itertuples(index=False):
        print(f"{row.variant},{row.train_size},{row.mse_mean:.6e},{row.mse_std:.6e}")
    return EXIT_CODES['ok']


def cmd_dump(args: argparse.Namespace) -> int:
    """Write a projector, CG tensor or change-of-basis matrix as a tensor document"""
    if args.kind == 'projector':
        doc = tensor_document(projector(args.l).p, kind='projector', l=args.l)
    elif args.kind == 'basis-o':
        doc = tensor_document(change_of_basis_O(args.l), kind='basis-o', l=args.l)
    else:
        t = cg(args.la, args.lb, args.lc)
        if not t.allowed:
            logger.warning(f"{WARNING} ({args.la}, {args.lb}, {args.lc}) violates the triangle rule; tensor is zero")
        doc = tensor_document(t.c, kind='cg', l=[args.la, args.lb, args.lc])

    if args.out:
        atomic_write_json(args.out, doc)
        print(f"{args.kind} {doc['shape']} -> {args.out}")
    else:
        print(json.dumps(doc, indent=TNCORE_CONFIG['json_indent']))
    return EXIT_CODES['ok']


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='so3tengen',
        description='Tensor-network construction of SO(3) invariant and equivariant functions',
        allow_abbrev=False,
    )
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING, ERROR or CRITICAL')
    parser.add_argument('--log-file', default=None, help='Append log records to this file')
    parser.add_argument('--jobs', type=int, default=None, help='Worker threads (capped by SO3TENGEN_THREADS)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('enumerate', help='Enumerate invariant generators of a signature')
    p.add_argument('signature', help='e.g. "cart:1,cart:1" or "sph:2,sum:1+2"')
    p.add_argument('--degree', type=int, required=True)
    p.add_argument('--epsilon', type=int, choices=(0, 1), default=1)
    p.add_argument('--seed', type=int, default=ENUMERATION_CONFIG['probe_seed'])
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser('basis', help='Build an equivariant basis by output-node removal')
    p.add_argument('signature')
    p.add_argument('--out-rep', required=True, help='"cart:<rank>" or "sph:<l>"')
    p.add_argument('--degree', type=int, required=True)
    p.add_argument('--epsilon', type=int, choices=(0, 1), default=1)
    p.add_argument('--seed', type=int, default=ENUMERATION_CONFIG['probe_seed'])
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_basis)

    p = sub.add_parser('verify', help='Monte-Carlo invariance / equivariance check')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--rotations', type=int, default=VERIFY_CONFIG['rotations'])
    p.add_argument('--tol', type=float, default=VERIFY_CONFIG['tolerance'])
    p.add_argument('--seed', type=int, default=VERIFY_CONFIG['seed'])
    p.add_argument('--report', default=None, help='Also write the report JSON here')
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('experiment', help='Train stress models over a grid of train sizes')
    p.add_argument('--variant', choices=VARIANTS, default=EXPERIMENT_CONFIG['variant'])
    p.add_argument('--train-sizes', type=_train_sizes, default=None)
    p.add_argument('--seed', type=int, default=EXPERIMENT_CONFIG['seed'])
    p.add_argument('--runs', type=int, default=None)
    p.add_argument('--law', choices=('neo_hookean', 'linear'), default=None)
    p.add_argument('--val-size', type=int, default=None)
    p.add_argument('--test-size', type=int, default=None)
    p.add_argument('--epochs-small', type=int, default=None)
    p.add_argument('--epochs-large', type=int, default=None)
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser('dump', help='Write an so3rep tensor as JSON')
    p.add_argument('--kind', choices=('projector', 'cg', 'basis-o'), required=True)
    p.add_argument('--l', type=int, default=1)
    p.add_argument('--la', type=int, default=1)
    p.add_argument('--lb', type=int, default=1)
    p.add_argument('--lc', type=int, default=0)
    p.add_argument('--out', default=None)
    p.set_defaults(handler=cmd_dump)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, configure logging and dispatch to a subcommand

    Expected failures are logged without a traceback and mapped to exit codes.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CODES['ok'] if e.code in (0, None) else EXIT_CODES['usage']

    setup_logging(level=args.log_level, log_file=args.log_file)
    ok, problems = validate_environment()
    if not ok:
        for problem in problems:
            logger.warning(f"{WARNING} {problem}")

    try:
        return args.handler(args)
    except EnumerationTooLarge as e:
        logger.error(f"{CROSS} {e}")
        return EXIT_CODES['enumeration_overflow']
    except TrainingDiverged as e:
        logger.error(f"{CROSS} {e}")
        return EXIT_CODES['training_diverged']
    except (So3TenGenError, ValueError, OSError) as e:
        logger.error(f"{CROSS} {e}")
        return EXIT_CODES['usage']

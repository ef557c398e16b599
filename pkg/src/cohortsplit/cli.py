"""Command-line interface.

Subcommands: split, audit, stats, baseline, eval, demo. Exit codes are part
of the contract: 0 success, 1 bad input or configuration, 2 leakage found
while --forbid-leakage is set. All outputs are deterministic: a rerun with
identical inputs writes byte-identical files.

The default seed is 0; the COHORTSPLIT_SEED environment variable overrides
it when no --seed/--seeds flag is given.
"""

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .audit import audit_split
from .baselines import (
    BASELINE_NAMES,
    CARRY_FORWARD,
    MAJORITY_CLASS,
    NEAREST_NEIGHBOR,
    carry_forward_predict,
    majority_class_predict,
    nearest_neighbor_predict,
)
from .cohort import build_cohort, count_transitions
from .demo import run_demo
from .errors import CohortSplitError
from .features import read_features
from .manifest import (
    dump_doc,
    load_doc,
    parse_manifest,
    read_assignment,
    read_predictions,
    write_assignment,
    write_predictions,
)
from .metrics import evaluate
from .splitting import (
    BY_SUBJECT,
    BY_VISIT_HISTORY,
    RANDOM_BY_SCAN,
    SplitRatios,
    reference_ratios,
    split_by_subject,
    split_by_visit_history,
    split_random_by_scan,
)

SCHEME_CHOICES = (RANDOM_BY_SCAN, BY_SUBJECT, BY_VISIT_HISTORY)


class CliError(CohortSplitError):
    """Bad command line; mapped to exit code 1 like any input error."""


class _Parser(argparse.ArgumentParser):
    # argparse's default error() exits with status 2, which this tool
    # reserves for the leakage verdict; route flag errors through exit 1.
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _default_seed() -> int:
    env = os.environ.get("COHORTSPLIT_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"COHORTSPLIT_SEED must be an integer, got {env!r}") from None
    return 0


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise CliError(f"bad seed list {text!r}; want comma-separated integers") from None
    if not seeds:
        raise CliError("empty seed list")
    return seeds


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _load_cohort(path: str):
    return build_cohort(parse_manifest(_read_text(path)))


def _load_assignment(path: str, cohort, metadata: str | None):
    meta_path = Path(metadata) if metadata else _sidecar_path(Path(path))
    meta_text = None
    if metadata or meta_path.exists():
        meta_text = _read_text(str(meta_path))
    return read_assignment(_read_text(path), cohort, meta_text)


def _sidecar_path(assignment_path: Path) -> Path:
    stem = assignment_path.stem if assignment_path.suffix == ".csv" else assignment_path.name
    return assignment_path.with_name(stem + ".meta.json")


def _ratios_from_args(args) -> SplitRatios:
    given = [args.train, args.val, args.test]
    if any(v is not None for v in given):
        if any(v is None for v in given):
            raise CliError("--train/--val/--test must be given together")
        return SplitRatios(train=args.train, val=args.val, test=args.test)
    return reference_ratios(args.val_fraction)


def cmd_split(args) -> int:
    cohort = _load_cohort(args.manifest)
    seeds = _parse_seeds(args.seeds) if args.seeds else [
        args.seed if args.seed is not None else _default_seed()
    ]

    def one_seed(seed: int):
        if args.scheme == RANDOM_BY_SCAN:
            assignment, excluded = split_random_by_scan(cohort, _ratios_from_args(args), seed), []
        elif args.scheme == BY_SUBJECT:
            assignment, excluded = (
                split_by_subject(cohort, _ratios_from_args(args), seed, stratify=args.stratify),
                [],
            )
        else:
            assignment, excluded = split_by_visit_history(cohort, args.val_fraction, seed)
        run_dir = Path(args.out) / f"{args.scheme}-seed{seed}"
        text, meta = write_assignment(assignment, cohort)
        _write_text(run_dir / "assignment.csv", text)
        _write_text(run_dir / "assignment.meta.json", meta)
        return assignment, excluded, run_dir

    if args.parallel and len(seeds) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            results = list(pool.map(one_seed, seeds))
    else:
        results = [one_seed(seed) for seed in seeds]

    for assignment, excluded, run_dir in results:
        counts = assignment.counts()
        sizes = "/".join(str(n) for n in counts.values())
        print(f"wrote {run_dir} (train/val/test scans: {sizes})")
        if excluded:
            print(
                f"warning: {len(excluded)} single-visit subjects have no held-out "
                f"visit and stay in the training pool",
                file=sys.stderr,
            )
    return 0


def cmd_audit(args) -> int:
    cohort = _load_cohort(args.manifest)
    assignment = _load_assignment(args.assignment, cohort, args.metadata)
    report = audit_split(cohort, assignment)
    doc = dump_doc(report.to_doc())
    if args.out:
        _write_text(Path(args.out), doc)
    print(doc, end="")
    if args.forbid_leakage and not report.subject_disjoint:
        print(
            f"leakage: {len(report.leaked_subjects)} subjects span train/val and test",
            file=sys.stderr,
        )
        return 2
    return 0


def cmd_stats(args) -> int:
    cohort = _load_cohort(args.manifest)
    stats = count_transitions(cohort)
    lines = [
        f"n_scans: {cohort.n_scans}",
        f"n_subjects: {cohort.n_subjects}",
        f"consecutive_pairs: {stats.consecutive_pairs}",
        f"total_transitions: {stats.total_transitions}",
        f"last_visit_transitions: {stats.last_visit_transitions}",
    ]
    if stats.per_transition_kind:
        lines.append("transitions by kind:")
        for (src, dst), n in sorted(
            stats.per_transition_kind.items(),
            key=lambda kv: (kv[0][0].stage_level, kv[0][1].stage_level),
        ):
            lines.append(f"  {src.value}->{dst.value}: {n}")
    print("\n".join(lines))
    if args.out:
        doc = {
            "n_scans": cohort.n_scans,
            "n_subjects": cohort.n_subjects,
            "consecutive_pairs": stats.consecutive_pairs,
            "total_transitions": stats.total_transitions,
            "last_visit_transitions": stats.last_visit_transitions,
            "per_transition_kind": {
                f"{src.value}->{dst.value}": n
                for (src, dst), n in sorted(stats.per_transition_kind.items())
            },
        }
        _write_text(Path(args.out), dump_doc(doc))
    return 0


def cmd_baseline(args) -> int:
    cohort = _load_cohort(args.manifest)
    assignment = _load_assignment(args.assignment, cohort, args.metadata)
    if args.baseline == CARRY_FORWARD:
        predictions = carry_forward_predict(cohort, assignment)
    elif args.baseline == MAJORITY_CLASS:
        predictions = majority_class_predict(cohort, assignment)
    else:
        if not args.features:
            raise CliError("--features is required for the nearest_neighbor baseline")
        features = read_features(_read_text(args.features))
        predictions = nearest_neighbor_predict(features, cohort, assignment, args.k)
    report = evaluate(predictions, cohort, assignment)
    out = Path(args.out)
    _write_text(out / "predictions.csv", write_predictions(predictions.labels))
    doc = report.to_doc()
    doc["baseline"] = predictions.baseline
    doc.update({f"baseline_{k}": v for k, v in predictions.params.items()})
    _write_text(out / "report.json", dump_doc(doc))
    print(f"{predictions.baseline}: accuracy {report.accuracy:.4f} on {report.n_scored} test scans")
    print(report.confusion.to_text())
    return 0


def cmd_eval(args) -> int:
    cohort = _load_cohort(args.manifest)
    assignment = _load_assignment(args.assignment, cohort, args.metadata)
    predictions = read_predictions(_read_text(args.predictions))
    report = evaluate(predictions, cohort, assignment)
    print(f"accuracy {report.accuracy:.4f} on {report.n_scored} test scans")
    print(report.confusion.to_text())
    if args.out:
        _write_text(Path(args.out), dump_doc(report.to_doc()))
    return 0


def cmd_demo(args) -> int:
    seeds = _parse_seeds(args.seeds) if args.seeds else None
    result = run_demo(
        seeds=seeds if seeds is not None else (0, 1, 2, 3, 4),
        k=args.k,
        parallel=args.parallel,
    )
    print("\n".join(result.format_lines()))
    if args.out:
        _write_text(Path(args.out), dump_doc(result.to_doc()))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="cohortsplit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed_flags(p):
        p.add_argument("--seed", type=int, default=None, help="single seed (default 0)")
        p.add_argument("--seeds", default=None, help="comma-separated seed list")
        p.add_argument(
            "--parallel", action="store_true",
            help="run multi-seed sweeps on a thread pool (same outputs as sequential)",
        )

    p = sub.add_parser("split", help="generate a split assignment")
    p.add_argument("--manifest", required=True)
    p.add_argument("--scheme", required=True, choices=SCHEME_CHOICES)
    p.add_argument("--out", required=True, help="output directory for run folders")
    p.add_argument("--train", type=float, default=None)
    p.add_argument("--val", type=float, default=None)
    p.add_argument("--test", type=float, default=None)
    p.add_argument(
        "--val-fraction", type=float, default=0.15, dest="val_fraction",
        help="validation share of the non-test pool (default 0.15)",
    )
    p.add_argument("--stratify", action="store_true", help="stratify by final-visit label (by_subject only)")
    add_seed_flags(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("audit", help="audit an assignment for subject leakage")
    p.add_argument("--manifest", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--metadata", default=None, help="metadata sidecar (default: sibling .meta.json)")
    p.add_argument("--out", default=None, help="write the audit report document here")
    p.add_argument("--forbid-leakage", action="store_true", dest="forbid_leakage")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("stats", help="print cohort and transition statistics")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None, help="write the statistics document here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("baseline", help="run a no-training baseline and score it")
    p.add_argument("--manifest", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--metadata", default=None)
    p.add_argument("--baseline", required=True, choices=BASELINE_NAMES)
    p.add_argument("--features", default=None, help="feature file (nearest_neighbor only)")
    p.add_argument("--k", type=int, default=1, help="neighbor count, odd (default 1)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="score a predictions file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--metadata", default=None)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", default=None, help="write the evaluation report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("demo", help="run the synthetic leakage demonstration")
    p.add_argument("--seeds", default=None, help="comma-separated seeds (default 0,1,2,3,4)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out", default=None, help="write the demo report document here")
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CohortSplitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

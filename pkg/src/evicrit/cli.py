"""Command-line interface.

Subcommands: evaluate (full pipeline), consistency (matrix gate only),
weights (entropy weighting only), fuse (evidence fusion of stored
assignments), selftest (fixture and oracle suite).

Exit codes: 0 success, 1 validation error, 2 consistency-gate failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ._version import __version__
from .ahp import CI_DENOMINATOR_MODES, DEFAULT_RI, aggregate_geometric, consistency
from .core import bpa_to_dict
from .entropy import DecisionMatrix, build_table
from .errors import EvicritError, InconsistentMatrix, IoError
from .evidence import murphy_combine, pignistic
from .fuzzy import OVERLAP_ADJACENT, OVERLAP_MODES
from .pipeline import (
    REPORT_FORMATS,
    PipelineConfig,
    ingest_matrices,
    ingest_priors,
    load_bpa_list,
    load_ri_table,
    run_pipeline,
)
from .report import _atomic_write

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INCONSISTENT = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the validation code, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evicrit",
                     description="Entropy-weighted fuzzy-evidential evaluation "
                                 "of the fourteen-indicator catalog")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    ev = sub.add_parser("evaluate", help="run the full pipeline")
    ev.add_argument("--scores", required=True,
                    help="CSV of expert scores (expert_id,indicator,score)")
    ev.add_argument("--matrices", required=True,
                    help="JSON of expert pairwise matrices")
    ev.add_argument("--priors", required=True,
                    help="CSV of prior weights (indicator,lambda)")
    ev.add_argument("--bpa-fixtures",
                    help="JSON of per-indicator mass functions; replaces "
                         "score fuzzification in the fusion stage")
    ev.add_argument("--alpha", type=float, default=1.0,
                    help="evidence reliability in [0,1] (default 1.0)")
    ev.add_argument("--overlap-mode", choices=OVERLAP_MODES,
                    default=OVERLAP_ADJACENT,
                    help="where held-back mass goes: the active adjacent "
                         "pair, or always the whole frame")
    ev.add_argument("--ci-denominator", choices=CI_DENOMINATOR_MODES,
                    default="paper", help="CI denominator: n or n-1")
    ev.add_argument("--ri-table",
                    help="JSON random-index overrides (order -> RI)")
    ev.add_argument("--window", type=int, default=4,
                    help="fusion window width (default 4)")
    ev.add_argument("--stride", type=int, default=2,
                    help="fusion window stride (default 2)")
    ev.add_argument("--out-dir", help="directory for manifest and report files")
    ev.add_argument("--format", choices=REPORT_FORMATS, default="text",
                    dest="fmt", help="report format (default text)")
    ev.add_argument("--chart", help="write a grouped-bar SVG to this path")
    ev.add_argument("--force", action="store_true",
                    help="proceed past a failed consistency gate")

    co = sub.add_parser("consistency", help="aggregate matrices and gate them")
    co.add_argument("--matrices", required=True)
    co.add_argument("--ci-denominator", choices=CI_DENOMINATOR_MODES,
                    default="paper")
    co.add_argument("--ri-table")

    we = sub.add_parser("weights", help="entropy weighting of the aggregated matrix")
    we.add_argument("--matrices", required=True)
    we.add_argument("--priors")
    we.add_argument("--out", help="write the CSV here instead of stdout")

    fu = sub.add_parser("fuse", help="combine stored mass functions "
                                     "(averaging rule)")
    fu.add_argument("--bpas", required=True,
                    help='JSON list of BPA objects (or {"bpas": [...]})')
    fu.add_argument("--out", help="write the result JSON here instead of stdout")

    sub.add_parser("selftest", help="run the fixture and oracle suite")
    return parser


def _merged_ri(path: str | None) -> dict[int, float]:
    table = dict(DEFAULT_RI)
    if path is not None:
        table.update(load_ri_table(path))
    return table


def _cmd_evaluate(args) -> int:
    config = PipelineConfig(
        scores=args.scores, matrices=args.matrices, priors=args.priors,
        bpa_fixtures=args.bpa_fixtures, alpha=args.alpha,
        overlap_mode=args.overlap_mode, ci_denominator=args.ci_denominator,
        ri_table=args.ri_table, window=args.window, stride=args.stride,
        force=args.force, out_dir=args.out_dir, fmt=args.fmt, chart=args.chart)
    manifest = run_pipeline(config)
    rep = manifest.consistency_report
    print(f"consistency: CR={rep.cr:.4f} ({rep.denominator_mode}) "
          f"acceptable={'yes' if rep.acceptable else 'no (forced)'}")
    by_weight = manifest.rankings["weight"]
    print(f"rank by weight: top={by_weight.top} bottom={by_weight.bottom}")
    adjusted = manifest.rankings.get("adjusted_weight")
    if adjusted is not None:
        print(f"rank by adjusted weight: top={adjusted.top} "
              f"bottom={adjusted.bottom}")
    fused = manifest.rankings["fused_belief"]
    print(f"rank by fused belief: top={fused.top} bottom={fused.bottom}")
    if args.out_dir:
        print(f"outputs written to {args.out_dir}")
    if args.chart:
        print(f"chart written to {args.chart}")
    return EXIT_OK


def _cmd_consistency(args) -> int:
    _, experts = ingest_matrices(args.matrices)
    aggregated = aggregate_geometric([m for _, m in experts])
    report = consistency(aggregated, ri_table=_merged_ri(args.ri_table),
                         denominator_mode=args.ci_denominator)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.acceptable else EXIT_INCONSISTENT


def _cmd_weights(args) -> int:
    ids, experts = ingest_matrices(args.matrices)
    aggregated = aggregate_geometric([m for _, m in experts])
    priors = ingest_priors(args.priors) if args.priors else None
    table = build_table(DecisionMatrix(aggregated.values, ids), priors=priors)
    text = table.to_csv()
    if args.out:
        _atomic_write(Path(args.out), text)
        print(f"weights written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_fuse(args) -> int:
    bpas = load_bpa_list(args.bpas)
    result = murphy_combine(bpas)
    doc = {
        "conflict_k": result.conflict_k,
        "masses": bpa_to_dict(result.bpa)["masses"],
        "betp": {l.name: p for l, p in pignistic(result.bpa).items()},
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _atomic_write(Path(args.out), text)
        print(f"fusion result written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_selftest(_args) -> int:
    from . import selftest
    return EXIT_OK if selftest.run_selftest() else EXIT_VALIDATION


_COMMANDS = {
    "evaluate": _cmd_evaluate,
    "consistency": _cmd_consistency,
    "weights": _cmd_weights,
    "fuse": _cmd_fuse,
    "selftest": _cmd_selftest,
}


def run(argv=None) -> int:
    """CLI entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InconsistentMatrix as e:
        _print_error(e)
        return EXIT_INCONSISTENT
    except IoError as e:
        _print_error(e)
        return EXIT_IO
    except EvicritError as e:
        _print_error(e)
        return EXIT_VALIDATION


def _print_error(e: EvicritError):
    stage = getattr(e, "stage", None)
    location = f" [stage: {stage}]" if stage else ""
    print(f"evicrit: error{location}: {e}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(run())

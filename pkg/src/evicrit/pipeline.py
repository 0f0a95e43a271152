"""Pipeline orchestration: file ingestion, the three processing stages, and
the run manifest.

The pipeline is deterministic end to end: identical input bytes and
configuration produce an identical manifest except for the timing fields.
Every error raised out of a stage carries the stage name on its ``stage``
attribute.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ._version import __version__
from .ahp import (
    CI_DENOMINATOR_MODES,
    CR_THRESHOLD,
    DEFAULT_RI,
    ConsistencyReport,
    PairwiseMatrix,
    aggregate_geometric,
    consistency,
)
from .core import (
    CATALOG_IDS,
    FRAME,
    Bpa,
    bpa_from_dict,
    bpa_to_dict,
)
from .entropy import DecisionMatrix, EntropyTable, build_table
from .errors import (
    ConfigError,
    EvicritError,
    InconsistentMatrix,
    InvalidMatrix,
    IoError,
    MissingIndicator,
    OrderMismatch,
    ParseError,
    ScoreOutOfRange,
    UnknownIndicator,
)
from .evidence import CombinationResult, average_bpas, murphy_combine, pignistic, rank
from .fuzzy import (
    OVERLAP_ADJACENT,
    OVERLAP_MODES,
    check_alpha,
    membership,
    rating_label,
    to_bpa,
)

REPORT_FORMATS = ("text", "csv", "json")


# --- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    """Everything an `evaluate` run needs; immutable once built."""

    scores: str | Path
    matrices: str | Path
    priors: str | Path | None = None
    bpa_fixtures: str | Path | None = None
    alpha: float = 1.0
    overlap_mode: str = OVERLAP_ADJACENT
    ci_denominator: str = "paper"
    ri_table: str | Path | None = None
    window: int = 4
    stride: int = 2
    force: bool = False
    out_dir: str | Path | None = None
    fmt: str = "text"
    chart: str | Path | None = None

    def validated(self) -> "PipelineConfig":
        try:
            check_alpha(self.alpha)
        except EvicritError as e:
            raise ConfigError(f"alpha: {e}") from None
        if self.overlap_mode not in OVERLAP_MODES:
            raise ConfigError(f"overlap_mode must be one of {OVERLAP_MODES}, "
                              f"got {self.overlap_mode!r}")
        if self.ci_denominator not in CI_DENOMINATOR_MODES:
            raise ConfigError(f"ci_denominator must be one of "
                              f"{CI_DENOMINATOR_MODES}, got {self.ci_denominator!r}")
        if self.fmt not in REPORT_FORMATS:
            raise ConfigError(f"format must be one of {REPORT_FORMATS}, "
                              f"got {self.fmt!r}")
        if self.window < 1:
            raise ConfigError(f"window must be at least 1, got {self.window}")
        if self.stride < 1:
            raise ConfigError(f"stride must be at least 1, got {self.stride}")
        return self


def windows(ids: Sequence[str], window: int, stride: int) -> tuple[tuple[str, ...], ...]:
    """Sliding index windows over ``ids``: starts 0, stride, 2*stride, ...

    The last window is the last one that fits entirely; a window wider than
    the id list is a configuration error.
    """
    n = len(ids)
    if window < 1 or window > n:
        raise ConfigError(f"window must be in 1..{n}, got {window}")
    if stride < 1:
        raise ConfigError(f"stride must be at least 1, got {stride}")
    return tuple(tuple(ids[start:start + window])
                 for start in range(0, n - window + 1, stride))


# --- ingestion ----------------------------------------------------------------

def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e


def _read_json(path: str | Path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e}") from e


def ingest_scores(path: str | Path) -> dict[str, float]:
    """Read expert scores and average them per indicator, in catalog order.

    The file must cover every catalog indicator at least once and nothing
    outside the catalog.
    """
    reader = csv.reader(io.StringIO(_read_text(path)))
    header = next(reader, None)
    if header != ["expert_id", "indicator", "score"]:
        raise ParseError(f"{path}: expected header expert_id,indicator,score, "
                         f"got {header}")
    collected: dict[str, list[float]] = {}
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"{path}:{line_no}: expected 3 columns, got {len(row)}")
        _, indicator_id, score_text = row
        if indicator_id not in CATALOG_IDS:
            raise UnknownIndicator(f"{path}:{line_no}: unknown indicator "
                                   f"{indicator_id!r}")
        try:
            value = float(score_text)
        except ValueError:
            raise ParseError(f"{path}:{line_no}: score {score_text!r} is not "
                             f"a number") from None
        if math.isnan(value) or not 0.0 <= value <= 10.0:
            raise ScoreOutOfRange(f"{path}:{line_no}: score {value!r} outside "
                                  f"[0, 10]")
        collected.setdefault(indicator_id, []).append(value)
    missing = [i for i in CATALOG_IDS if i not in collected]
    if missing:
        raise MissingIndicator(f"{path}: no scores for {', '.join(missing)}")
    return {i: math.fsum(collected[i]) / len(collected[i]) for i in CATALOG_IDS}


def ingest_matrices(path: str | Path) -> tuple[tuple[str, ...],
                                               list[tuple[str, PairwiseMatrix]]]:
    """Read expert pairwise matrices: (indicator ids, [(expert id, matrix)])."""
    doc = _read_json(path)
    try:
        ids = list(doc["indicators"])
        experts = list(doc["experts"])
    except (KeyError, TypeError):
        raise ParseError(f'{path}: needs "indicators" and "experts" keys') from None
    if not ids or not all(isinstance(i, str) for i in ids):
        raise ParseError(f'{path}: "indicators" must be a nonempty list of ids')
    if len(set(ids)) != len(ids):
        raise ParseError(f'{path}: duplicate indicator ids')
    if not experts:
        raise ParseError(f'{path}: "experts" list is empty')
    n = len(ids)
    out: list[tuple[str, PairwiseMatrix]] = []
    for pos, entry in enumerate(experts):
        try:
            expert_id = str(entry["id"])
            rows = entry["matrix"]
        except (KeyError, TypeError):
            raise ParseError(f'{path}: experts[{pos}] needs "id" and "matrix"') from None
        try:
            values = np.array(rows, dtype=float)
        except (TypeError, ValueError):
            raise ParseError(f"{path}: expert {entry.get('id', pos)!r}: matrix "
                             f"is not rectangular numeric") from None
        if values.shape != (n, n):
            raise OrderMismatch(f"{path}: expert {expert_id!r}: matrix shape "
                                f"{values.shape} does not match {n} indicators")
        try:
            out.append((expert_id, PairwiseMatrix(values)))
        except InvalidMatrix as e:
            raise InvalidMatrix(f"{path}: expert {expert_id!r}: {e}") from None
    return tuple(ids), out


def ingest_priors(path: str | Path) -> dict[str, float]:
    """Read per-indicator prior weights from `indicator,lambda` CSV."""
    reader = csv.reader(io.StringIO(_read_text(path)))
    header = next(reader, None)
    if header != ["indicator", "lambda"]:
        raise ParseError(f"{path}: expected header indicator,lambda, got {header}")
    priors: dict[str, float] = {}
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"{path}:{line_no}: expected 2 columns, got {len(row)}")
        indicator_id, value_text = row
        if indicator_id in priors:
            raise ParseError(f"{path}:{line_no}: duplicate prior for {indicator_id}")
        try:
            priors[indicator_id] = float(value_text)
        except ValueError:
            raise ParseError(f"{path}:{line_no}: prior {value_text!r} is not "
                             f"a number") from None
    if not priors:
        raise ParseError(f"{path}: no prior rows")
    return priors


def load_ri_table(path: str | Path) -> dict[int, float]:
    """Read a random-index override table: JSON object order -> RI."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: RI table must be a JSON object")
    table: dict[int, float] = {}
    for key, value in doc.items():
        try:
            order = int(key)
            ri = float(value)
        except (TypeError, ValueError):
            raise ParseError(f"{path}: bad RI entry {key!r}: {value!r}") from None
        if order < 1 or ri < 0.0 or math.isnan(ri):
            raise ParseError(f"{path}: bad RI entry {key!r}: {value!r}")
        table[order] = ri
    return table


def load_bpa_fixtures(path: str | Path) -> dict[str, Bpa]:
    """Read per-indicator mass functions: JSON object indicator -> BPA."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: BPA fixtures must be a JSON object keyed "
                         f"by indicator id")
    out: dict[str, Bpa] = {}
    for indicator_id, cell in doc.items():
        if indicator_id not in CATALOG_IDS:
            raise UnknownIndicator(f"{path}: unknown indicator {indicator_id!r}")
        try:
            out[indicator_id] = bpa_from_dict(cell)
        except EvicritError as e:
            raise type(e)(f"{path}: {indicator_id}: {e}") from None
    missing = [i for i in CATALOG_IDS if i not in out]
    if missing:
        raise MissingIndicator(f"{path}: no assignment for {', '.join(missing)}")
    return out


def load_bpa_list(path: str | Path) -> list[Bpa]:
    """Read an ordered list of mass functions ({"bpas": [...]} or a bare list)."""
    doc = _read_json(path)
    if isinstance(doc, dict) and "bpas" in doc:
        doc = doc["bpas"]
    if not isinstance(doc, list) or not doc:
        raise ParseError(f"{path}: expected a nonempty list of BPA objects")
    out = []
    for pos, cell in enumerate(doc):
        try:
            out.append(bpa_from_dict(cell))
        except EvicritError as e:
            raise type(e)(f"{path}: bpas[{pos}]: {e}") from None
    return out


def _digest(path: str | Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e


# --- manifest -----------------------------------------------------------------

@dataclass
class RunManifest:
    """Everything one pipeline run computed, traceable to input digests."""

    version: str
    inputs: dict[str, dict]
    config: dict
    consistency_report: ConsistencyReport
    entropy_table: EntropyTable
    ratings: tuple[tuple[str, float, str], ...]
    window_ids: tuple[tuple[str, ...], ...]
    window_results: tuple[CombinationResult, ...]
    overall: Bpa
    rankings: dict[str, object]
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        fusion_windows = []
        for ids, result in zip(self.window_ids, self.window_results):
            fusion_windows.append({
                "indicators": list(ids),
                "conflict_k": result.conflict_k,
                "masses": bpa_to_dict(result.bpa)["masses"],
                "betp": {l.name: p for l, p in pignistic(result.bpa).items()},
            })
        return {
            "version": self.version,
            "inputs": self.inputs,
            "config": self.config,
            "consistency": self.consistency_report.to_dict(),
            "entropy_table": self.entropy_table.rows(),
            "ratings": [{"indicator": i, "score": s, "label": l}
                        for i, s, l in self.ratings],
            "fusion": {
                "windows": fusion_windows,
                "average": {
                    "masses": bpa_to_dict(self.overall)["masses"],
                    "betp": {l.name: p for l, p in pignistic(self.overall).items()},
                },
            },
            "rankings": {key: report.to_dict()
                         for key, report in self.rankings.items()},
            "timings": self.timings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@contextmanager
def _stage(name: str, timings: dict[str, float]):
    started = time.perf_counter()
    try:
        yield
    except EvicritError as e:
        if e.stage is None:
            e.stage = name
        raise
    finally:
        timings[name] = time.perf_counter() - started


# --- the run -------------------------------------------------------------------

def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Execute ingestion, weighting, fuzzification, fusion, and ranking.

    Aborts with InconsistentMatrix when the aggregated judgments fail the
    consistency gate, unless ``config.force`` is set.  When ``out_dir`` is
    configured, the manifest and report files are written as well.
    """
    from . import report as report_mod

    config = config.validated()
    timings: dict[str, float] = {}

    inputs: dict[str, dict] = {}
    with _stage("ingest", timings):
        scores = ingest_scores(config.scores)
        inputs["scores"] = {"path": str(config.scores),
                            "sha256": _digest(config.scores)}
        matrix_ids, experts = ingest_matrices(config.matrices)
        inputs["matrices"] = {"path": str(config.matrices),
                              "sha256": _digest(config.matrices)}
        if tuple(matrix_ids) != CATALOG_IDS:
            raise OrderMismatch(
                f"{config.matrices}: indicator ids {list(matrix_ids)} do not "
                f"match the catalog {list(CATALOG_IDS)}")
        priors = None
        if config.priors is not None:
            priors = ingest_priors(config.priors)
            inputs["priors"] = {"path": str(config.priors),
                                "sha256": _digest(config.priors)}
        ri_table = dict(DEFAULT_RI)
        if config.ri_table is not None:
            ri_table.update(load_ri_table(config.ri_table))
            inputs["ri_table"] = {"path": str(config.ri_table),
                                  "sha256": _digest(config.ri_table)}
        fixtures = None
        if config.bpa_fixtures is not None:
            fixtures = load_bpa_fixtures(config.bpa_fixtures)
            inputs["bpa_fixtures"] = {"path": str(config.bpa_fixtures),
                                      "sha256": _digest(config.bpa_fixtures)}

    with _stage("aggregate", timings):
        aggregated = aggregate_geometric([m for _, m in experts])

    with _stage("consistency", timings):
        report = consistency(aggregated, ri_table=ri_table,
                             denominator_mode=config.ci_denominator)
        if not report.acceptable and not config.force:
            raise InconsistentMatrix(
                f"aggregated matrix fails the consistency gate: CR = "
                f"{report.cr:.4f} >= {CR_THRESHOLD} (lambda_max = "
                f"{report.lambda_max:.6f}); rerun with --force to proceed",
                report=report)

    with _stage("weighting", timings):
        decision = DecisionMatrix(aggregated.values, matrix_ids)
        table = build_table(decision, priors=priors)

    with _stage("fuzzify", timings):
        ratings = []
        bpas: dict[str, Bpa] = {}
        for indicator_id in CATALOG_IDS:
            v = membership(scores[indicator_id])
            ratings.append((indicator_id, scores[indicator_id],
                            rating_label(v).name))
            if fixtures is not None:
                bpas[indicator_id] = fixtures[indicator_id]
            else:
                bpas[indicator_id] = to_bpa(v, alpha=config.alpha,
                                            overlap_mode=config.overlap_mode)

    with _stage("fuse", timings):
        window_ids = windows(CATALOG_IDS, config.window, config.stride)
        window_results = tuple(
            murphy_combine([bpas[i] for i in ids]) for ids in window_ids)
        overall = average_bpas([r.bpa for r in window_results])

    with _stage("rank", timings):
        rankings = {
            "weight": rank(dict(zip(table.ids, table.weights)),
                           note="entropy weights"),
        }
        if table.adjusted is not None:
            rankings["adjusted_weight"] = rank(
                dict(zip(table.ids, table.adjusted)),
                note="entropy weights adjusted by priors")
        betp = pignistic(overall)
        rankings["fused_belief"] = rank(
            {l.name: p for l, p in betp.items()},
            note="pignistic probability of the fused overall assignment",
            tie_order=[l.name for l in FRAME])

    manifest = RunManifest(
        version=__version__,
        inputs=inputs,
        config={
            "alpha": config.alpha,
            "overlap_mode": config.overlap_mode,
            "ci_denominator": config.ci_denominator,
            "window": config.window,
            "stride": config.stride,
            "force": config.force,
            "score_aggregation": "mean",
            "bpa_source": "fixtures" if config.bpa_fixtures is not None else "scores",
        },
        consistency_report=report,
        entropy_table=table,
        ratings=tuple(ratings),
        window_ids=window_ids,
        window_results=window_results,
        overall=overall,
        rankings=rankings,
        timings=timings,
    )

    if config.out_dir is not None:
        with _stage("emit", timings):
            out_dir = Path(config.out_dir)
            report_mod.write_manifest(manifest, out_dir / "manifest.json")
            report_mod.emit_report(manifest, config.fmt, out_dir)
            if config.chart is not None:
                report_mod.emit_chart(manifest, config.chart)
    elif config.chart is not None:
        with _stage("emit", timings):
            report_mod.emit_chart(manifest, config.chart)

    return manifest

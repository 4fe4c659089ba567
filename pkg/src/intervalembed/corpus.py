"""Corpus statistics over interval embeddings.

The pipeline per MIDI file is: screen -> render pianorolls -> encode every
track melodically and every pair of tracks harmonically -> count notes per
interval and consecutive interval pairs. Counts from many files are summed
per composer before any ratio is taken.
"""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .embedder import (
    IntervalSequence,
    ModeMismatch,
    RleSequence,
    harmonic_from_pianorolls,
    melodic_from_pianoroll,
    rle_encode,
)
from .intervals import Interval, canonical, interval_class
from .midi import MalformedFile, MidiPiece, read_midi, to_pianorolls
from .pianoroll import DEFAULT_RESOLUTION, Pianoroll, active_length

__all__ = [
    "KEEP",
    "EXCLUDE",
    "ALL",
    "MIN_BARS",
    "ScreenReport",
    "screen_file",
    "screen_path",
    "interval_histogram",
    "minor_major_ratio",
    "desc_asc_ratio",
    "RatioReport",
    "ratio_report",
    "PairMatrix",
    "pair_matrix",
    "simultaneous_pair_matrix",
    "piece_sequences",
    "FileAnalysis",
    "analyze_rolls",
    "analyze_file",
    "CorpusStats",
    "aggregate_by_composer",
    "composer_from_path",
    "CorpusRun",
    "analyze_corpus",
]

KEEP, EXCLUDE = "keep", "exclude"
ALL = "ALL"
MIN_BARS = 10
# MIDI default when a file carries no time signature
DEFAULT_NUMERATOR = 4

PARSE_ERROR = "parse_error"
MULTIPLE_TIME_SIGNATURES = "multiple_time_signatures"
TOO_FEW_BARS = "too_few_bars"
NUMERATOR_ONE = "numerator_one"


# ---------------------------------------------------------------- screening

@dataclass(frozen=True)
class ScreenReport:
    verdict: str
    reason: Optional[str] = None
    bars: Fraction = Fraction(0)
    path: Optional[str] = None
    detail: str = ""

    @property
    def kept(self):
        return self.verdict == KEEP


def screen_file(parsed, resolution: int = DEFAULT_RESOLUTION, rolls=None, path=None) -> ScreenReport:
    """Decide whether a parsed file enters the corpus.

    ``parsed`` is either a :class:`MidiPiece` or the exception raised while
    parsing. Exclusion reasons are checked in this order: parse error, more
    than one time-signature event, fewer than 10 bars, numerator of 1. Bars
    are ``active_length / resolution / numerator`` of the first time
    signature. Never raises.
    """
    if not isinstance(parsed, MidiPiece):
        return ScreenReport(EXCLUDE, PARSE_ERROR, Fraction(0), path, str(parsed))
    try:
        if rolls is None:
            rolls = to_pianorolls(parsed, resolution)
        length = max((active_length(r) for r in rolls), default=0)
        sigs = parsed.time_signatures
        numerator = sigs[0].numerator if sigs else DEFAULT_NUMERATOR
        bars = Fraction(length, resolution * numerator) if numerator > 0 else Fraction(0)
    except Exception as exc:
        return ScreenReport(EXCLUDE, PARSE_ERROR, Fraction(0), path, str(exc))
    if len(sigs) > 1:
        return ScreenReport(EXCLUDE, MULTIPLE_TIME_SIGNATURES, bars, path)
    if bars < MIN_BARS:
        return ScreenReport(EXCLUDE, TOO_FEW_BARS, bars, path)
    if numerator == 1:
        return ScreenReport(EXCLUDE, NUMERATOR_ONE, bars, path)
    return ScreenReport(KEEP, None, bars, path)


def screen_path(path, resolution: int = DEFAULT_RESOLUTION) -> Tuple[ScreenReport, Optional[MidiPiece]]:
    try:
        piece = read_midi(path)
    except (MalformedFile, OSError) as exc:
        return screen_file(exc, resolution, path=str(path)), None
    return screen_file(piece, resolution, path=str(path)), piece


# ---------------------------------------------------------------- counting

def _runs(seq):
    if isinstance(seq, RleSequence):
        return seq.runs
    return rle_encode(seq).runs


def interval_histogram(seqs: Iterable) -> Counter:
    """Count notes (RLE runs, not timesteps) per interval; silence is skipped.

    Keys are table-spelled intervals, so enharmonic spellings are pooled.
    """
    hist = Counter()
    for seq in seqs:
        for tok, _ in _runs(seq):
            if tok is not None:
                hist[canonical(tok)] += 1
    return hist


def _is_zero_distance(tok: Interval) -> bool:
    return tok.order == 1 and tok.itype == 0 and tok.octave == 0


def _ratio(num, den):
    return num / den if den else None


@dataclass(frozen=True)
class RatioReport:
    f_min: int
    f_maj: int
    f_dsc: int
    f_asc: int

    @property
    def r_min_maj(self) -> Optional[float]:
        return _ratio(self.f_min, self.f_min + self.f_maj)

    @property
    def r_dsc_asc(self) -> Optional[float]:
        return _ratio(self.f_dsc, self.f_dsc + self.f_asc)


def ratio_report(hist: Counter) -> RatioReport:
    f_min = sum(n for tok, n in hist.items() if tok.itype == -1)
    f_maj = sum(n for tok, n in hist.items() if tok.itype == 1)
    f_dsc = sum(n for tok, n in hist.items() if not _is_zero_distance(tok) and tok.descending)
    f_asc = sum(n for tok, n in hist.items() if not _is_zero_distance(tok) and not tok.descending)
    return RatioReport(f_min, f_maj, f_dsc, f_asc)


def minor_major_ratio(hist: Counter) -> Optional[float]:
    """``f_min / (f_min + f_Maj)``; None when no minor or Major interval occurs."""
    return ratio_report(hist).r_min_maj


def desc_asc_ratio(hist: Counter) -> Optional[float]:
    """``f_dsc / (f_dsc + f_asc)`` over intervals with nonzero distance; None if there are none."""
    return ratio_report(hist).r_dsc_asc


@dataclass(frozen=True, eq=False)
class PairMatrix:
    """Counts of interval class ``i`` being directly followed by class ``j``.

    Rows and columns follow :data:`intervalembed.intervals.CLASS_LABELS`.
    """

    directed: np.ndarray
    mode: str = "melodic"

    @property
    def undirected(self) -> np.ndarray:
        sym = self.directed + self.directed.T
        np.fill_diagonal(sym, np.diag(self.directed))
        return sym

    @property
    def total(self) -> int:
        return int(self.directed.sum())

    def __add__(self, other: "PairMatrix") -> "PairMatrix":
        if other.mode != self.mode:
            raise ModeMismatch(f"cannot add {self.mode} and {other.mode} pair matrices")
        return PairMatrix(self.directed + other.directed, self.mode)

    def __eq__(self, other):
        if not isinstance(other, PairMatrix):
            return NotImplemented
        return self.mode == other.mode and np.array_equal(self.directed, other.directed)

    @classmethod
    def zeros(cls, mode="melodic"):
        return cls(np.zeros((12, 12), dtype=np.int64), mode)


def pair_matrix(seqs: Sequence, mode: Optional[str] = None) -> PairMatrix:
    """Directed counts over consecutive notes; a silence breaks the chain."""
    seqs = list(seqs)
    modes = {s.mode for s in seqs}
    if mode is None:
        if len(modes) > 1:
            raise ModeMismatch(f"sequences mix modes {sorted(modes)}")
        mode = modes.pop() if modes else "melodic"
    elif modes - {mode}:
        raise ModeMismatch(f"expected {mode} sequences, got {sorted(modes)}")
    counts = np.zeros((12, 12), dtype=np.int64)
    for seq in seqs:
        prev = None
        for tok, _ in _runs(seq):
            cls = None if tok is None else interval_class(tok)
            if prev is not None and cls is not None:
                counts[prev, cls] += 1
            prev = cls
    return PairMatrix(counts, mode)


def simultaneous_pair_matrix(seqs: Sequence[IntervalSequence]) -> np.ndarray:
    """Symmetric counts of interval classes sounding together.

    ``seqs`` are time-aligned harmonic sequences of one piece. Each time the
    vertical configuration changes, every unordered pair of the sounding
    harmonic intervals is counted once.
    """
    counts = np.zeros((12, 12), dtype=np.int64)
    if not seqs:
        return counts
    length = len(seqs[0])
    if any(len(s) != length for s in seqs):
        raise ValueError("harmonic sequences of one piece must share a length")
    prev = None
    for t in range(length):
        column = tuple(s.tokens[t] for s in seqs)
        if column == prev:
            continue
        prev = column
        classes = [interval_class(tok) for tok in column if tok is not None]
        for a, b in combinations(classes, 2):
            counts[a, b] += 1
            if a != b:
                counts[b, a] += 1
    return counts


# ---------------------------------------------------------------- per piece

def piece_sequences(rolls: Sequence[Pianoroll]) -> Tuple[List[IntervalSequence], List[IntervalSequence]]:
    """Melodic sequence per track and harmonic sequence per unordered track pair.

    Each pair ``(i, j)`` with ``i < j`` uses track ``i`` as the reference.
    Silent tracks only yield silence, so they are left out of the pairs.
    """
    melodic = [melodic_from_pianoroll(r) for r in rolls]
    voiced = [i for i, r in enumerate(rolls) if r.grid.any()]
    harmonic = [
        harmonic_from_pianorolls(rolls[j], rolls[i], reference_id=i)
        for i, j in combinations(voiced, 2)
    ]
    return melodic, harmonic


@dataclass
class FileAnalysis:
    path: Optional[str] = None
    melodic_hist: Counter = field(default_factory=Counter)
    harmonic_hist: Counter = field(default_factory=Counter)
    melodic_pairs: PairMatrix = field(default_factory=lambda: PairMatrix.zeros("melodic"))
    harmonic_pairs: PairMatrix = field(default_factory=lambda: PairMatrix.zeros("harmonic"))
    simultaneous: np.ndarray = field(default_factory=lambda: np.zeros((12, 12), dtype=np.int64))


def analyze_rolls(rolls: Sequence[Pianoroll], path=None) -> FileAnalysis:
    melodic, harmonic = piece_sequences(rolls)
    return FileAnalysis(
        path=path,
        melodic_hist=interval_histogram(melodic),
        harmonic_hist=interval_histogram(harmonic),
        melodic_pairs=pair_matrix(melodic, "melodic"),
        harmonic_pairs=pair_matrix(harmonic, "harmonic"),
        simultaneous=simultaneous_pair_matrix(harmonic),
    )


def analyze_file(path, resolution: int = DEFAULT_RESOLUTION) -> Tuple[ScreenReport, Optional[FileAnalysis]]:
    """Screen one file and, if it is kept, analyze it."""
    try:
        piece = read_midi(path)
    except (MalformedFile, OSError) as exc:
        return screen_file(exc, resolution, path=str(path)), None
    rolls = to_pianorolls(piece, resolution)
    report = screen_file(piece, resolution, rolls=rolls, path=str(path))
    if not report.kept:
        return report, None
    return report, analyze_rolls(rolls, str(path))


# ---------------------------------------------------------------- aggregation

@dataclass
class CorpusStats:
    n_files: int = 0
    melodic_hist: Counter = field(default_factory=Counter)
    harmonic_hist: Counter = field(default_factory=Counter)
    melodic_pairs: PairMatrix = field(default_factory=lambda: PairMatrix.zeros("melodic"))
    harmonic_pairs: PairMatrix = field(default_factory=lambda: PairMatrix.zeros("harmonic"))
    simultaneous: np.ndarray = field(default_factory=lambda: np.zeros((12, 12), dtype=np.int64))

    def add(self, fa: FileAnalysis) -> None:
        self.n_files += 1
        self.melodic_hist.update(fa.melodic_hist)
        self.harmonic_hist.update(fa.harmonic_hist)
        self.melodic_pairs = self.melodic_pairs + fa.melodic_pairs
        self.harmonic_pairs = self.harmonic_pairs + fa.harmonic_pairs
        self.simultaneous = self.simultaneous + fa.simultaneous

    @property
    def melodic(self) -> RatioReport:
        return ratio_report(self.melodic_hist)

    @property
    def harmonic(self) -> RatioReport:
        return ratio_report(self.harmonic_hist)


def composer_from_path(path, root) -> str:
    """Top-level directory of ``path`` below ``root``; files directly in ``root`` get ``"_root"``."""
    rel = Path(os.path.relpath(os.fspath(path), os.fspath(root)))
    return rel.parts[0] if len(rel.parts) > 1 else "_root"


def aggregate_by_composer(
    file_results: Iterable[FileAnalysis], composer_of: Callable[[FileAnalysis], str]
) -> Dict[str, CorpusStats]:
    """Sum counts per composer label, plus an ``"ALL"`` entry over everything.

    Ratios are taken from the summed counts (ratio of sums), never averaged.
    """
    stats: Dict[str, CorpusStats] = {ALL: CorpusStats()}
    for fa in file_results:
        label = composer_of(fa)
        stats.setdefault(label, CorpusStats()).add(fa)
        stats[ALL].add(fa)
    return {ALL: stats[ALL], **{k: stats[k] for k in sorted(stats) if k != ALL}}


# ---------------------------------------------------------------- whole corpus

@dataclass
class CorpusRun:
    screening: List[ScreenReport]
    stats: Dict[str, CorpusStats]

    @property
    def excluded_fraction(self) -> float:
        if not self.screening:
            return 0.0
        return sum(not r.kept for r in self.screening) / len(self.screening)


def _analyze_one(args):
    path, resolution = args
    return analyze_file(path, resolution)


def analyze_corpus(paths: Sequence, root=None, resolution: int = DEFAULT_RESOLUTION, jobs: int = 1) -> CorpusRun:
    """Screen and analyze ``paths``; output order follows ``paths`` for any ``jobs``."""
    paths = [os.fspath(p) for p in paths]
    work = [(p, resolution) for p in paths]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_analyze_one, work, chunksize=1))
    else:
        outcomes = [_analyze_one(w) for w in work]
    screening = [report for report, _ in outcomes]
    analyses = [fa for _, fa in outcomes if fa is not None]
    if root is None:
        stats = aggregate_by_composer(analyses, lambda fa: Path(fa.path).parent.name or "_root")
    else:
        stats = aggregate_by_composer(analyses, lambda fa: composer_from_path(fa.path, root))
    return CorpusRun(screening, stats)


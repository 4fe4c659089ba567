"""Pianoroll <-> interval-sequence codecs.

Three encodings are supported, each producing one token per timestep:

``melodic``
    interval from the previous sounding note to the current one. A held note
    repeats its onset token, so a run of equal tokens is a note duration.
``harmonic``
    interval from a reference track's melody to the target's melody at the
    same timestep.
``barline``
    interval from the first sounding note of the bar to the current note.

Silence is the token ``None``. All encoders work on the highest voice of a
roll (see :func:`intervalembed.pianoroll.extract_melody`).
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .intervals import (
    IntervalToken,
    interval_to_semitones,
    make_interval_from_pitches,
    respell,
    token_from_json,
    token_to_json,
)
from .pianoroll import DEFAULT_RESOLUTION, REST, Pianoroll, extract_melody, from_melody

__all__ = [
    "MODES",
    "IntervalSequence",
    "RleSequence",
    "PitchOutOfRange",
    "LengthMismatch",
    "ModeMismatch",
    "melodic_from_pianoroll",
    "pianoroll_from_melodic",
    "harmonic_from_pianorolls",
    "pianoroll_from_harmonic",
    "bar_anchors",
    "barline_from_pianoroll",
    "pianoroll_from_barline",
    "rle_encode",
    "rle_decode",
    "BulkResult",
    "bulk_map",
    "sequence_to_json",
    "sequence_from_json",
    "sequence_to_csv",
    "sequence_from_csv",
]

MODES = ("melodic", "harmonic", "barline")
DEFAULT_ORIGIN = 60
DEFAULT_VELOCITY = 100


class PitchOutOfRange(ValueError):
    """Decoding walked outside MIDI pitches 0..127."""


class LengthMismatch(ValueError):
    pass


class ModeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class IntervalSequence:
    """One token per timestep.

    ``reference`` names the reference track of a harmonic sequence, ``origin``
    is the first sounding pitch of a melodic encoding and ``anchors`` the
    per-bar anchor pitches of a barline encoding; all three are optional
    metadata that decoding can fall back on.
    """

    mode: str
    tokens: Tuple[IntervalToken, ...]
    resolution: int = DEFAULT_RESOLUTION
    reference: Optional[str] = None
    origin: Optional[int] = None
    anchors: Optional[Tuple[Optional[int], ...]] = None
    bar_length: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.anchors is not None:
            object.__setattr__(self, "anchors", tuple(self.anchors))

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class RleSequence:
    runs: Tuple[Tuple[IntervalToken, int], ...]
    mode: str = "melodic"
    resolution: int = DEFAULT_RESOLUTION
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple((tok, int(n)) for tok, n in self.runs))
        for i, (tok, n) in enumerate(self.runs):
            if n < 1:
                raise ValueError(f"run {i} has non-positive length {n}")
            if i and self.runs[i - 1][0] == tok:
                raise ValueError(f"runs {i - 1} and {i} carry the same token")

    def __len__(self):
        return sum(n for _, n in self.runs)


def _check_pitch(pitch, t):
    if not 0 <= pitch <= 127:
        raise PitchOutOfRange(f"decoded pitch {pitch} at timestep {t} is outside 0..127")
    return pitch


# ---------------------------------------------------------------- melodic

def melodic_from_pianoroll(roll: Pianoroll, respell_repeats: bool = True) -> IntervalSequence:
    """Encode the melody of ``roll`` as melodic intervals.

    The first note of the piece gets a perfect unison. Intervals are taken
    from the previous *sounding* pitch, so rests do not reset the reference.

    When a note directly follows another note by the same interval as that
    note's own (C-D-E: two Major 2nds), the second interval is written with
    its enharmonic spelling (diminished 3rd) so the note boundary survives as
    a token change. Set ``respell_repeats=False`` to always use the table
    spelling; such sequences then merge the two notes on decoding.
    """
    line = extract_melody(roll)
    tokens = []
    prev_pitch = None
    current = None
    last = REST
    for pitch in line.tolist():
        if pitch == REST:
            tokens.append(None)
        else:
            if pitch != last:
                token = make_interval_from_pitches(pitch if prev_pitch is None else prev_pitch, pitch)
                if respell_repeats and last != REST and token == current:
                    token = respell(token)
                current = token
                prev_pitch = pitch
            tokens.append(current)
        last = pitch
    origin = int(line[line != REST][0]) if (line != REST).any() else None
    return IntervalSequence("melodic", tokens, roll.resolution, origin=origin)


def pianoroll_from_melodic(seq, origin: Optional[int] = None, velocity: int = DEFAULT_VELOCITY) -> Pianoroll:
    """Decode a melodic sequence into a monophonic roll.

    Each maximal run of one token is one held note. The first note sounds at
    ``origin`` (default: the sequence's recorded origin, else middle C).
    """
    if isinstance(seq, RleSequence):
        seq = rle_decode(seq)
    if seq.mode != "melodic":
        raise ModeMismatch(f"expected a melodic sequence, got {seq.mode!r}")
    if origin is None:
        origin = seq.origin if seq.origin is not None else DEFAULT_ORIGIN
    line = np.full(len(seq.tokens), REST, dtype=np.int64)
    pitch = None
    prev = None
    for t, tok in enumerate(seq.tokens):
        if tok is not None:
            if tok != prev:
                pitch = origin if pitch is None else pitch + interval_to_semitones(tok)
                _check_pitch(pitch, t)
            line[t] = pitch
        prev = tok
    return from_melody(line, velocity, seq.resolution)


# ---------------------------------------------------------------- harmonic

def harmonic_from_pianorolls(target: Pianoroll, reference: Pianoroll, reference_id=None) -> IntervalSequence:
    """Interval from the reference melody up (or down) to the target melody, per timestep."""
    if len(target) != len(reference):
        raise LengthMismatch(f"target has {len(target)} timesteps, reference has {len(reference)}")
    if target.resolution != reference.resolution:
        raise LengthMismatch(
            f"target resolution {target.resolution} differs from reference resolution {reference.resolution}"
        )
    tgt = extract_melody(target).tolist()
    ref = extract_melody(reference).tolist()
    tokens = [
        None if (p == REST or q == REST) else make_interval_from_pitches(q, p)
        for p, q in zip(tgt, ref)
    ]
    ref_id = None if reference_id is None else str(reference_id)
    return IntervalSequence("harmonic", tokens, target.resolution, reference=ref_id)


def pianoroll_from_harmonic(seq, reference: Pianoroll, velocity: int = DEFAULT_VELOCITY) -> Pianoroll:
    if isinstance(seq, RleSequence):
        seq = rle_decode(seq)
    if seq.mode != "harmonic":
        raise ModeMismatch(f"expected a harmonic sequence, got {seq.mode!r}")
    if len(seq) != len(reference):
        raise LengthMismatch(f"sequence has {len(seq)} tokens, reference has {len(reference)} timesteps")
    ref = extract_melody(reference)
    line = np.full(len(seq), REST, dtype=np.int64)
    for t, tok in enumerate(seq.tokens):
        if tok is not None and ref[t] != REST:
            line[t] = _check_pitch(int(ref[t]) + interval_to_semitones(tok), t)
    return from_melody(line, velocity, seq.resolution)


# ---------------------------------------------------------------- barline

def bar_anchors(roll: Pianoroll, bar_length: int) -> List[Optional[int]]:
    """First sounding melody pitch of every bar (None for silent bars)."""
    if bar_length < 1:
        raise ValueError(f"bar_length must be >= 1, got {bar_length}")
    line = extract_melody(roll)
    anchors = []
    for start in range(0, len(line), bar_length):
        bar = line[start : start + bar_length]
        sounding = bar[bar != REST]
        anchors.append(int(sounding[0]) if sounding.size else None)
    return anchors


def barline_from_pianoroll(roll: Pianoroll, bar_length: int) -> IntervalSequence:
    """Interval from each bar's first sounding note to the melody at every timestep."""
    anchors = bar_anchors(roll, bar_length)
    line = extract_melody(roll).tolist()
    tokens = []
    for t, pitch in enumerate(line):
        anchor = anchors[t // bar_length]
        tokens.append(None if pitch == REST or anchor is None else make_interval_from_pitches(anchor, pitch))
    return IntervalSequence(
        "barline", tokens, roll.resolution, anchors=anchors, bar_length=bar_length
    )


def pianoroll_from_barline(seq, bar_anchors=None, velocity: int = DEFAULT_VELOCITY, bar_length=None) -> Pianoroll:
    if isinstance(seq, RleSequence):
        seq = rle_decode(seq)
    if seq.mode != "barline":
        raise ModeMismatch(f"expected a barline sequence, got {seq.mode!r}")
    anchors = seq.anchors if bar_anchors is None else tuple(bar_anchors)
    bar_length = bar_length or seq.bar_length
    if anchors is None or bar_length is None:
        raise ValueError("barline decoding needs bar anchors and a bar length")
    n_bars = -(-len(seq) // bar_length)
    if len(anchors) < n_bars:
        raise LengthMismatch(f"{n_bars} bars need anchors, got {len(anchors)}")
    line = np.full(len(seq), REST, dtype=np.int64)
    for t, tok in enumerate(seq.tokens):
        if tok is None:
            continue
        anchor = anchors[t // bar_length]
        if anchor is None:
            raise ValueError(f"bar {t // bar_length} has a note but no anchor pitch")
        line[t] = _check_pitch(anchor + interval_to_semitones(tok), t)
    return from_melody(line, velocity, seq.resolution)


# ---------------------------------------------------------------- RLE

def rle_encode(seq: IntervalSequence) -> RleSequence:
    runs = []
    for tok in seq.tokens:
        if runs and runs[-1][0] == tok:
            runs[-1][1] += 1
        else:
            runs.append([tok, 1])
    meta = {k: getattr(seq, k) for k in ("reference", "origin", "anchors", "bar_length") if getattr(seq, k) is not None}
    return RleSequence(tuple(map(tuple, runs)), seq.mode, seq.resolution, meta)


def rle_decode(rle: RleSequence) -> IntervalSequence:
    tokens = [tok for tok, n in rle.runs for _ in range(n)]
    return IntervalSequence(rle.mode, tokens, rle.resolution, **rle.meta)


# ---------------------------------------------------------------- bulk

class BulkResult(NamedTuple):
    """Outcome of :func:`bulk_map`.

    ``results`` holds the successful outputs in input order; ``errors`` holds
    ``(index, exception)`` for every item that raised.
    """

    results: list
    errors: List[Tuple[int, BaseException]]

    @property
    def ok(self):
        return not self.errors


def _guarded(op, item):
    try:
        return True, op(item)
    except Exception as exc:  # collected, reported per item
        return False, exc


def bulk_map(items: Sequence, op: Callable, jobs: int = 1) -> BulkResult:
    """Apply ``op`` to every item, collecting per-item failures.

    Results come back in input order whatever ``jobs`` is.
    """
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda it: _guarded(op, it), items))
    else:
        outcomes = [_guarded(op, it) for it in items]
    results, errors = [], []
    for i, (ok, value) in enumerate(outcomes):
        if ok:
            results.append(value)
        else:
            errors.append((i, value))
    return BulkResult(results, errors)


# ---------------------------------------------------------------- I/O

def sequence_to_dict(seq) -> dict:
    if isinstance(seq, RleSequence):
        doc = {"mode": seq.mode, "resolution": seq.resolution}
        doc.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in seq.meta.items()})
        doc["tokens"] = [token_to_json(tok) for tok, _ in seq.runs]
        doc["runs"] = [n for _, n in seq.runs]
        return doc
    doc = {"mode": seq.mode, "resolution": seq.resolution}
    for key in ("reference", "origin", "anchors", "bar_length"):
        value = getattr(seq, key)
        if value is not None:
            doc[key] = list(value) if isinstance(value, tuple) else value
    doc["tokens"] = [token_to_json(tok) for tok in seq.tokens]
    return doc


def sequence_from_dict(doc: dict):
    meta = {k: doc[k] for k in ("reference", "origin", "anchors", "bar_length") if doc.get(k) is not None}
    if "anchors" in meta:
        meta["anchors"] = tuple(meta["anchors"])
    tokens = [token_from_json(t) for t in doc["tokens"]]
    resolution = int(doc.get("resolution", DEFAULT_RESOLUTION))
    if "runs" in doc:
        if len(doc["runs"]) != len(tokens):
            raise ValueError("'runs' and 'tokens' differ in length")
        return RleSequence(tuple(zip(tokens, doc["runs"])), doc["mode"], resolution, meta)
    return IntervalSequence(doc["mode"], tokens, resolution, **meta)


def sequence_to_json(seq) -> str:
    return json.dumps(sequence_to_dict(seq), separators=(",", ":"))


def sequence_from_json(text: str):
    return sequence_from_dict(json.loads(text))


_CSV_HEADER = ["order", "type", "octave", "desc", "run"]


def sequence_to_csv(seq) -> str:
    """One row per token (per run for RLE input); silence leaves the interval fields empty."""
    pairs = seq.runs if isinstance(seq, RleSequence) else [(tok, 1) for tok in seq.tokens]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for tok, n in pairs:
        if tok is None:
            writer.writerow(["", "", "", "", n])
        else:
            writer.writerow([tok.order, tok.itype, tok.octave, int(tok.descending), n])
    return buf.getvalue()


def sequence_from_csv(text: str, mode: str = "melodic", resolution: int = DEFAULT_RESOLUTION, rle: bool = False):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != _CSV_HEADER:
        raise ValueError(f"interval CSV must start with the header {','.join(_CSV_HEADER)}")
    pairs = []
    for row in rows[1:]:
        if not row:
            continue
        order, itype, octave, desc, run = row
        tok = None if order == "" else token_from_json(
            {"order": order, "type": itype, "octave": octave, "desc": desc not in ("0", "false", "False")}
        )
        pairs.append((tok, int(run)))
    if rle:
        return RleSequence(tuple(pairs), mode, resolution)
    return IntervalSequence(mode, [tok for tok, n in pairs for _ in range(n)], resolution)


def semitone_line(seq: IntervalSequence) -> List[Optional[int]]:
    """Signed semitone value per token (None for silence); handy for inspection."""
    return [None if tok is None else interval_to_semitones(tok) for tok in seq.tokens]


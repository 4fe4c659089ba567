"""Dense single-track pianorolls.

A pianoroll is a ``(T, 128)`` matrix where row ``t`` holds the velocity of
every MIDI pitch at timestep ``t``; 0 is silence.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

__all__ = [
    "N_PITCHES",
    "REST",
    "Pianoroll",
    "Violation",
    "InvalidPianoroll",
    "validate",
    "extract_melody",
    "active_length",
    "first_pitch",
    "from_melody",
    "to_csv",
    "from_csv",
    "to_json",
    "from_json",
]

N_PITCHES = 128
REST = -1
DEFAULT_RESOLUTION = 24


class Violation(NamedTuple):
    kind: str  # "shape", "velocity" or "resolution"
    where: tuple
    detail: str


class InvalidPianoroll(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        shown = "; ".join(v.detail for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid pianoroll: {shown}{more}")


def validate(grid, resolution: int = DEFAULT_RESOLUTION) -> List[Violation]:
    """Check a candidate pianoroll matrix.

    Returns an empty list for a well-formed roll, otherwise one
    :class:`Violation` per problem (each out-of-range velocity is reported
    with its ``(timestep, pitch)`` location).
    """
    if isinstance(grid, Pianoroll):
        grid, resolution = grid.grid, grid.resolution
    arr = np.asarray(grid)
    violations = []
    if not isinstance(resolution, (int, np.integer)) or resolution < 1:
        violations.append(Violation("resolution", (), f"resolution must be >= 1, got {resolution!r}"))
    if arr.ndim != 2 or arr.shape[1] != N_PITCHES:
        violations.append(
            Violation("shape", tuple(arr.shape), f"expected shape (T, {N_PITCHES}), got {arr.shape}")
        )
        return violations
    if arr.size and not np.issubdtype(arr.dtype, np.number):
        violations.append(Violation("velocity", (), f"non-numeric dtype {arr.dtype}"))
        return violations
    if arr.size and np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.round(arr)):
        violations.append(Violation("velocity", (), "velocities must be integers"))
    bad = np.argwhere((arr < 0) | (arr > 127))
    for t, p in bad:
        violations.append(
            Violation("velocity", (int(t), int(p)), f"velocity {arr[t, p]} at ({t}, {p})")
        )
    return violations


@dataclass(frozen=True, eq=False)
class Pianoroll:
    """Immutable velocity matrix for one track.

    Attributes
    ----------
    grid : np.ndarray, shape=(T, 128), dtype=uint8
        Velocity per timestep and pitch. Read-only.
    resolution : int
        Timesteps per beat.
    """

    grid: np.ndarray
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        violations = validate(self.grid, self.resolution)
        if violations:
            raise InvalidPianoroll(violations)
        grid = np.array(self.grid, dtype=np.uint8, copy=True)
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "resolution", int(self.resolution))

    @classmethod
    def empty(cls, length: int, resolution: int = DEFAULT_RESOLUTION) -> "Pianoroll":
        return cls(np.zeros((length, N_PITCHES), dtype=np.uint8), resolution)

    def __len__(self):
        return self.grid.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Pianoroll):
            return NotImplemented
        return self.resolution == other.resolution and np.array_equal(self.grid, other.grid)

    def __repr__(self):
        return f"Pianoroll(T={len(self)}, resolution={self.resolution})"

    def transpose(self, semitones: int) -> "Pianoroll":
        """Shift every note by ``semitones``; raises if a note leaves 0..127."""
        out = np.zeros_like(self.grid)
        pitches = np.nonzero(self.grid.any(axis=0))[0]
        if pitches.size and (pitches.min() + semitones < 0 or pitches.max() + semitones > 127):
            raise ValueError(f"transposition by {semitones} leaves the MIDI pitch range")
        if semitones >= 0:
            out[:, semitones:] = self.grid[:, : N_PITCHES - semitones]
        else:
            out[:, :semitones] = self.grid[:, -semitones:]
        return Pianoroll(out, self.resolution)


def extract_melody(roll: Pianoroll) -> np.ndarray:
    """Highest sounding pitch per timestep, ``REST`` (-1) where nothing sounds."""
    active = roll.grid > 0
    top = N_PITCHES - 1 - np.argmax(active[:, ::-1], axis=1)
    return np.where(active.any(axis=1), top, REST).astype(np.int64)


def active_length(roll: Pianoroll) -> int:
    """One past the last timestep in which any pitch sounds (0 if silent)."""
    sounding = np.nonzero(roll.grid.any(axis=1))[0]
    return int(sounding[-1]) + 1 if sounding.size else 0


def first_pitch(roll: Pianoroll):
    """Melody pitch of the first sounding timestep, or None."""
    line = extract_melody(roll)
    sounding = line[line != REST]
    return int(sounding[0]) if sounding.size else None


def from_melody(line, velocity: int = 100, resolution: int = DEFAULT_RESOLUTION) -> Pianoroll:
    """Build a monophonic roll from a pitch line (``REST`` for silence)."""
    line = np.asarray(line, dtype=np.int64)
    grid = np.zeros((line.shape[0], N_PITCHES), dtype=np.uint8)
    t = np.nonzero(line != REST)[0]
    grid[t, line[t]] = velocity
    return Pianoroll(grid, resolution)


def to_csv(roll: Pianoroll) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"p{i}" for i in range(N_PITCHES)])
    writer.writerows(roll.grid.tolist())
    return buf.getvalue()


def from_csv(text: str, resolution: int = DEFAULT_RESOLUTION) -> Pianoroll:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != [f"p{i}" for i in range(N_PITCHES)]:
        raise ValueError("pianoroll CSV must start with the header p0..p127")
    body = [[int(v) for v in row] for row in rows[1:] if row]
    grid = np.array(body, dtype=np.int64).reshape(len(body), N_PITCHES)
    return Pianoroll(grid, resolution)


def to_json(roll: Pianoroll) -> str:
    return json.dumps({"resolution": roll.resolution, "grid": roll.grid.tolist()}, separators=(",", ":"))


def from_json(text: str) -> Pianoroll:
    doc = json.loads(text)
    grid = np.array(doc["grid"], dtype=np.int64)
    if grid.size == 0:
        grid = grid.reshape(0, N_PITCHES)
    return Pianoroll(grid, doc.get("resolution", DEFAULT_RESOLUTION))

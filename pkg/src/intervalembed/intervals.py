"""Music-theoretic intervals and their mapping to and from semitone distances.

An interval is stored as an ordinal (1 = unison ... 7 = seventh), a type code,
a whole-octave offset and a direction flag. Type codes::

    -2 diminished, -1 minor, 0 perfect, 1 Major, 2 augmented

Converting semitones to an interval always uses one fixed spelling per
semitone class (6 semitones is a diminished fifth, never an augmented fourth),
so the mapping is a bijection on signed semitone counts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

__all__ = [
    "Interval",
    "IntervalToken",
    "IllegalInterval",
    "SEMITONE_TABLE",
    "CLASS_LABELS",
    "semitones_to_interval",
    "interval_to_semitones",
    "make_interval_from_pitches",
    "interval_name",
    "interval_class",
    "canonical",
    "respell",
    "token_to_json",
    "token_from_json",
]

DIMINISHED, MINOR, PERFECT, MAJOR, AUGMENTED = -2, -1, 0, 1, 2

PERFECT_ORDERS = frozenset({1, 4, 5})
IMPERFECT_ORDERS = frozenset({2, 3, 6, 7})

# (order, type) for simple distances 0..11 semitones
SEMITONE_TABLE = (
    (1, PERFECT),
    (2, MINOR),
    (2, MAJOR),
    (3, MINOR),
    (3, MAJOR),
    (4, PERFECT),
    (5, DIMINISHED),
    (5, PERFECT),
    (6, MINOR),
    (6, MAJOR),
    (7, MINOR),
    (7, MAJOR),
)

# semitones of the perfect / Major spelling of each order
_BASE_SEMITONES = {1: 0, 2: 2, 3: 4, 4: 5, 5: 7, 6: 9, 7: 11}

_TYPE_NAMES = {DIMINISHED: "dim", MINOR: "min", PERFECT: "perfect", MAJOR: "Maj", AUGMENTED: "aug"}
_ORDINALS = {1: "1st", 2: "2nd", 3: "3rd", 4: "4th", 5: "5th", 6: "6th", 7: "7th"}

MAX_SEMITONES = 127


class IllegalInterval(ValueError):
    """Raised for an (order, type) pair that no interval can have."""


def _is_legal(order: int, itype: int) -> bool:
    if order in PERFECT_ORDERS:
        return itype in (DIMINISHED, PERFECT, AUGMENTED)
    if order in IMPERFECT_ORDERS:
        return itype in (DIMINISHED, MINOR, MAJOR, AUGMENTED)
    return False


@dataclass(frozen=True)
class Interval:
    """A directed, possibly compound, interval.

    Parameters
    ----------
    order : int
        Ordinal number of the simple interval, 1..7.
    itype : int
        Quality code in -2..2 (diminished, minor, perfect, Major, augmented).
    octave : int
        Whole octaves added on top of the simple interval.
    descending : bool
        True when the second pitch is below the first.

    A perfect unison without octave offset is always stored as ascending.
    """

    order: int
    itype: int
    octave: int = 0
    descending: bool = False

    def __post_init__(self):
        if not isinstance(self.order, int) or not 1 <= self.order <= 7:
            raise IllegalInterval(f"order must be in 1..7, got {self.order!r}")
        if not isinstance(self.itype, int) or not -2 <= self.itype <= 2:
            raise IllegalInterval(f"type must be in -2..2, got {self.itype!r}")
        if not isinstance(self.octave, int) or self.octave < 0:
            raise IllegalInterval(f"octave must be a non-negative int, got {self.octave!r}")
        if not _is_legal(self.order, self.itype):
            raise IllegalInterval(
                f"{_TYPE_NAMES[self.itype]} {_ORDINALS[self.order]} is not a valid interval"
            )
        object.__setattr__(self, "descending", bool(self.descending))
        if self.order == 1 and self.itype == PERFECT and self.octave == 0:
            object.__setattr__(self, "descending", False)

    @property
    def semitones(self) -> int:
        return interval_to_semitones(self)

    def __str__(self):
        return interval_name(self)


# Silence is represented by None.
IntervalToken = Optional[Interval]


def _build_lookup():
    lookup = {}
    for s in range(-MAX_SEMITONES, MAX_SEMITONES + 1):
        octave, rem = divmod(abs(s), 12)
        order, itype = SEMITONE_TABLE[rem]
        lookup[s] = Interval(order, itype, octave, s < 0)
    return lookup


_LOOKUP = _build_lookup()


def semitones_to_interval(semitones: int) -> Interval:
    """Convert a signed semitone distance into its canonical interval.

    >>> semitones_to_interval(7)
    Interval(order=5, itype=0, octave=0, descending=False)
    >>> semitones_to_interval(-4)
    Interval(order=3, itype=1, octave=0, descending=True)
    """
    try:
        return _LOOKUP[semitones]
    except (KeyError, TypeError):
        raise ValueError(
            f"semitone distance must be an int within +-{MAX_SEMITONES}, got {semitones!r}"
        ) from None


def interval_to_semitones(interval: Interval) -> int:
    """Signed semitone distance spanned by ``interval``."""
    order, itype = interval.order, interval.itype
    if not _is_legal(order, itype):
        raise IllegalInterval(f"illegal (order, type) pair ({order}, {itype})")
    if order in PERFECT_ORDERS:
        offset = itype // 2
    else:
        offset = {MAJOR: 0, MINOR: -1, DIMINISHED: -2, AUGMENTED: 1}[itype]
    magnitude = _BASE_SEMITONES[order] + offset + 12 * interval.octave
    return -magnitude if interval.descending else magnitude


def make_interval_from_pitches(first: int, second: int) -> Interval:
    """Interval leading from MIDI pitch ``first`` to MIDI pitch ``second``."""
    for p in (first, second):
        if not 0 <= p <= 127:
            raise ValueError(f"MIDI pitch out of range: {p}")
    return _LOOKUP[int(second) - int(first)]


def interval_class(interval: Interval) -> int:
    """Simple semitone class 0..11, ignoring octave and direction."""
    return abs(interval_to_semitones(interval)) % 12


def canonical(interval: Interval) -> Interval:
    """Table spelling of the same signed distance (identity for canonical input)."""
    return _LOOKUP[interval_to_semitones(interval)]


# enharmonic partner of each canonical class: (order, type, extra octaves)
_ALTERNATIVE = {
    0: (2, DIMINISHED, 0),
    1: (1, AUGMENTED, 0),
    2: (3, DIMINISHED, 0),
    3: (2, AUGMENTED, 0),
    4: (4, DIMINISHED, 0),
    5: (3, AUGMENTED, 0),
    6: (4, AUGMENTED, 0),
    7: (6, DIMINISHED, 0),
    8: (5, AUGMENTED, 0),
    9: (7, DIMINISHED, 0),
    10: (6, AUGMENTED, 0),
    11: (1, DIMINISHED, 1),
}


def respell(interval: Interval) -> Interval:
    """The other common spelling of the same distance.

    Canonical input maps to its enharmonic partner (Major 2nd -> diminished
    3rd, minor 2nd -> augmented unison, ...) and any other spelling maps back
    to the canonical one, so ``respell`` never returns its argument.
    """
    semitones = interval_to_semitones(interval)
    canon = _LOOKUP[semitones]
    if interval != canon:
        return canon
    octave, rem = divmod(abs(semitones), 12)
    order, itype, extra = _ALTERNATIVE[rem]
    return Interval(order, itype, octave + extra, semitones < 0)


def interval_name(interval: Interval) -> str:
    """Readable name such as ``"perfect 5th"`` or ``"Maj 3rd +1 octave desc"``."""
    parts = [_TYPE_NAMES[interval.itype], _ORDINALS[interval.order]]
    if interval.octave == 1:
        parts.append("+1 octave")
    elif interval.octave > 1:
        parts.append(f"+{interval.octave} octaves")
    if interval.descending:
        parts.append("desc")
    return " ".join(parts)


CLASS_LABELS = tuple(interval_name(Interval(o, t)) for o, t in SEMITONE_TABLE)


def token_to_json(token: IntervalToken):
    if token is None:
        return None
    return {
        "order": token.order,
        "type": token.itype,
        "octave": token.octave,
        "desc": token.descending,
    }


def token_from_json(obj) -> IntervalToken:
    if obj is None:
        return None
    try:
        return Interval(int(obj["order"]), int(obj["type"]), int(obj["octave"]), bool(obj["desc"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"not an interval token: {obj!r}") from exc

"""Minimal Standard MIDI File reader (formats 0 and 1).

Only what the embedding needs is kept: note spans per track and
time-signature events. Tempo, controllers, SysEx and unknown meta events are
read past using their declared lengths.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from .pianoroll import DEFAULT_RESOLUTION, N_PITCHES, Pianoroll

__all__ = [
    "MalformedFile",
    "NoteEvent",
    "TimeSignature",
    "MidiPiece",
    "parse_midi",
    "read_midi",
    "tick_to_step",
    "to_pianorolls",
]

# data bytes following each channel-voice status nibble
_DATA_LENGTH = {0x8: 2, 0x9: 2, 0xA: 2, 0xB: 2, 0xC: 1, 0xD: 1, 0xE: 2}


class MalformedFile(ValueError):
    """The bytes are not a readable format 0/1 Standard MIDI File."""


@dataclass(frozen=True)
class NoteEvent:
    onset_tick: int
    offset_tick: int
    pitch: int
    velocity: int


@dataclass(frozen=True)
class TimeSignature:
    tick: int
    numerator: int
    denominator: int


@dataclass
class MidiPiece:
    division: int
    tracks: List[List[NoteEvent]] = field(default_factory=list)
    time_signatures: List[TimeSignature] = field(default_factory=list)
    format: int = 1


class _Reader:
    __slots__ = ("data", "pos", "end")

    def __init__(self, data, pos=0, end=None):
        self.data = data
        self.pos = pos
        self.end = len(data) if end is None else end

    def take(self, n):
        if self.pos + n > self.end:
            raise MalformedFile(f"unexpected end of data at byte {self.pos}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def byte(self):
        if self.pos >= self.end:
            raise MalformedFile(f"unexpected end of data at byte {self.pos}")
        b = self.data[self.pos]
        self.pos += 1
        return b

    def varlen(self):
        value = 0
        for _ in range(4):
            b = self.byte()
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise MalformedFile(f"variable-length quantity longer than 4 bytes near byte {self.pos}")

    def at_end(self):
        return self.pos >= self.end


def _parse_track(reader: _Reader, time_signatures: list) -> List[NoteEvent]:
    tick = 0
    status = None
    # (channel, pitch) -> FIFO of (onset_tick, velocity)
    open_notes: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    notes = []

    def close(channel, pitch, at):
        queue = open_notes.get((channel, pitch))
        if queue:
            onset, velocity = queue.pop(0)
            if at > onset:
                notes.append(NoteEvent(onset, at, pitch, velocity))

    while not reader.at_end():
        tick += reader.varlen()
        lead = reader.byte()
        if lead == 0xFF:
            kind = reader.byte()
            payload = reader.take(reader.varlen())
            if kind == 0x2F:
                break
            if kind == 0x58:
                if len(payload) < 2:
                    raise MalformedFile("time signature event shorter than 2 bytes")
                time_signatures.append(TimeSignature(tick, payload[0], 2 ** payload[1]))
            continue
        if lead in (0xF0, 0xF7):
            reader.take(reader.varlen())
            continue
        if lead >= 0xF0:
            raise MalformedFile(f"unexpected system message 0x{lead:02X} in track data")
        if lead & 0x80:
            status = lead
            first = reader.byte()
        else:
            if status is None:
                raise MalformedFile("data byte without running status")
            first = lead
        kind, channel = status >> 4, status & 0x0F
        data = [first]
        if _DATA_LENGTH[kind] == 2:
            data.append(reader.byte())
        if any(b & 0x80 for b in data):
            raise MalformedFile(f"status byte where data byte expected near byte {reader.pos}")
        if kind == 0x9 and data[1] > 0:
            open_notes.setdefault((channel, data[0]), []).append((tick, data[1]))
        elif kind == 0x8 or kind == 0x9:
            close(channel, data[0], tick)

    for (channel, pitch), queue in list(open_notes.items()):
        while queue:
            close(channel, pitch, tick)
    notes.sort(key=lambda n: (n.onset_tick, n.pitch, n.offset_tick))
    return notes


def parse_midi(data: bytes) -> MidiPiece:
    """Parse the raw bytes of a Standard MIDI File.

    Raises
    ------
    MalformedFile
        Bad chunk magic, truncation, an over-long variable-length quantity,
        SMPTE timing, format 2, or a broken event stream.
    """
    data = bytes(data)
    reader = _Reader(data)
    if reader.take(4) != b"MThd":
        raise MalformedFile("missing MThd header")
    length = int.from_bytes(reader.take(4), "big")
    if length < 6:
        raise MalformedFile(f"header chunk too short ({length} bytes)")
    header = reader.take(length)
    fmt = int.from_bytes(header[0:2], "big")
    ntracks = int.from_bytes(header[2:4], "big")
    division = int.from_bytes(header[4:6], "big")
    if fmt not in (0, 1):
        raise MalformedFile(f"unsupported SMF format {fmt}")
    if division & 0x8000:
        raise MalformedFile("SMPTE time division is not supported")
    if division == 0:
        raise MalformedFile("division of zero ticks per quarter note")

    piece = MidiPiece(division=division, format=fmt)
    while len(piece.tracks) < ntracks:
        if reader.end - reader.pos < 8:
            raise MalformedFile(f"expected {ntracks} tracks, found {len(piece.tracks)}")
        magic = reader.take(4)
        size = int.from_bytes(reader.take(4), "big")
        if reader.pos + size > reader.end:
            raise MalformedFile(f"chunk {magic!r} truncated")
        if magic == b"MTrk":
            piece.tracks.append(_parse_track(_Reader(data, reader.pos, reader.pos + size), piece.time_signatures))
        reader.pos += size
    piece.time_signatures.sort(key=lambda ts: ts.tick)
    return piece


def read_midi(path) -> MidiPiece:
    with open(os.fspath(path), "rb") as f:
        return parse_midi(f.read())


def tick_to_step(tick: int, resolution: int, division: int) -> int:
    """``round(tick * resolution / division)`` with halves rounded up, in exact integers."""
    return (2 * tick * resolution + division) // (2 * division)


def to_pianorolls(piece: MidiPiece, resolution: int = DEFAULT_RESOLUTION) -> List[Pianoroll]:
    """Render every track onto a grid of ``resolution`` steps per beat.

    Notes that round to zero length are dropped. Where notes of the same pitch
    overlap, the later onset's velocity wins. All rolls share the length of
    the longest track.
    """
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    spans = []
    length = 0
    for track in piece.tracks:
        track_spans = []
        for note in sorted(track, key=lambda n: n.onset_tick):
            start = tick_to_step(note.onset_tick, resolution, piece.division)
            stop = tick_to_step(note.offset_tick, resolution, piece.division)
            if stop > start:
                track_spans.append((start, stop, note.pitch, note.velocity))
                length = max(length, stop)
        spans.append(track_spans)
    rolls = []
    for track_spans in spans:
        grid = np.zeros((length, N_PITCHES), dtype=np.uint8)
        for start, stop, pitch, velocity in track_spans:
            grid[start:stop, pitch] = velocity
        rolls.append(Pianoroll(grid, resolution))
    return rolls

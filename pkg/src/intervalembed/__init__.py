"""Interval-based embeddings of symbolic music.

Pianorolls (from MIDI or built by hand) are converted to and from sequences
of music-theoretic intervals in three flavours: melodic, harmonic and
barline-relative. Corpus tools count interval occurrences and transitions.
"""
from .intervals import (
    CLASS_LABELS,
    IllegalInterval,
    Interval,
    interval_name,
    interval_to_semitones,
    make_interval_from_pitches,
    semitones_to_interval,
)
from .pianoroll import REST, Pianoroll, active_length, extract_melody, validate
from .midi import MalformedFile, MidiPiece, parse_midi, read_midi, to_pianorolls
from .embedder import (
    IntervalSequence,
    RleSequence,
    bulk_map,
    barline_from_pianoroll,
    harmonic_from_pianorolls,
    melodic_from_pianoroll,
    pianoroll_from_barline,
    pianoroll_from_harmonic,
    pianoroll_from_melodic,
    rle_decode,
    rle_encode,
)

__all__ = [
    "CLASS_LABELS",
    "IllegalInterval",
    "Interval",
    "interval_name",
    "interval_to_semitones",
    "make_interval_from_pitches",
    "semitones_to_interval",
    "REST",
    "Pianoroll",
    "active_length",
    "extract_melody",
    "validate",
    "MalformedFile",
    "MidiPiece",
    "parse_midi",
    "read_midi",
    "to_pianorolls",
    "IntervalSequence",
    "RleSequence",
    "bulk_map",
    "barline_from_pianoroll",
    "harmonic_from_pianorolls",
    "melodic_from_pianoroll",
    "pianoroll_from_barline",
    "pianoroll_from_harmonic",
    "pianoroll_from_melodic",
    "rle_decode",
    "rle_encode",
]

__version__ = "0.1.0"

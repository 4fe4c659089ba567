import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

import midi_builder as mb
from conftest import random_line
from intervalembed.corpus import (
    ALL,
    FileAnalysis,
    ModeMismatch,
    aggregate_by_composer,
    analyze_rolls,
    composer_from_path,
    desc_asc_ratio,
    interval_histogram,
    minor_major_ratio,
    pair_matrix,
    piece_sequences,
    ratio_report,
    screen_file,
    simultaneous_pair_matrix,
)
from intervalembed.embedder import IntervalSequence, rle_encode
from intervalembed.intervals import Interval, semitones_to_interval as iv
from intervalembed.midi import MalformedFile, parse_midi
from intervalembed.pianoroll import from_melody


def seq(*tokens, mode="melodic"):
    return IntervalSequence(mode, tokens)


# ---------------------------------------------------------------- screening

def test_screen_too_few_bars():
    data = mb.smf([mb.beats_to_notes([(60, 16)])])
    report = screen_file(parse_midi(data), 24)
    assert report.verdict == "exclude" and report.reason == "too_few_bars"
    assert report.bars == Fraction(384, 24 * 4) == 4


def test_screen_numerator_one():
    data = mb.smf([mb.beats_to_notes([(60, 40)])], time_signatures=((0, 1),))
    report = screen_file(parse_midi(data))
    assert (report.verdict, report.reason) == ("exclude", "numerator_one")


def test_screen_keeps_clean_piece():
    data = mb.smf([mb.beats_to_notes([(60, 24), (62, 24)])])
    report = screen_file(parse_midi(data))
    assert report.kept and report.reason is None and report.bars == 12


def test_screen_parse_error_and_multiple_signatures():
    assert screen_file(MalformedFile("bad")).reason == "parse_error"
    data = mb.smf([mb.beats_to_notes([(60, 48)])], time_signatures=((0, 4), (0, 4)))
    assert screen_file(parse_midi(data)).reason == "multiple_time_signatures"


def test_screen_without_time_signature_assumes_four():
    data = mb.header(0, 1, 480) + mb.track(mb.note_events([(0, 480 * 40, 60, 90)]))
    assert screen_file(parse_midi(data)).bars == 10


# ---------------------------------------------------------------- histograms / ratios

def test_histogram_counts_notes_not_steps():
    hist = interval_histogram([seq(*[iv(4)] * 24)])
    assert hist == Counter({iv(4): 1})
    assert interval_histogram([seq(None, None)]) == Counter()
    assert interval_histogram([seq(iv(1), iv(-2))]) == Counter({iv(1): 1, iv(-2): 1})


def test_histogram_pools_enharmonic_spellings():
    assert interval_histogram([seq(Interval(2, 1), Interval(3, -2))]) == Counter({iv(2): 2})


def test_ratios():
    assert minor_major_ratio(Counter({iv(1): 3, iv(2): 3})) == 0.5
    assert minor_major_ratio(Counter({iv(4): 5})) == 0.0
    assert minor_major_ratio(Counter({iv(0): 5, iv(7): 2})) is None
    assert desc_asc_ratio(Counter()) is None
    assert desc_asc_ratio(Counter({iv(-3): 1, iv(4): 3, iv(0): 9})) == 0.25
    # a descending octave has a direction, a unison does not
    assert desc_asc_ratio(Counter({iv(-12): 1, iv(0): 4})) == 1.0


def test_ratio_report_counts():
    rep = ratio_report(Counter({iv(1): 2, iv(-4): 3, iv(7): 1, iv(0): 4}))
    assert (rep.f_min, rep.f_maj, rep.f_dsc, rep.f_asc) == (2, 3, 3, 3)


# ---------------------------------------------------------------- pair matrices

def test_pair_matrix_examples():
    m = pair_matrix([seq(iv(2), iv(10), iv(2))])
    assert m.directed[2, 10] == 1 and m.directed[10, 2] == 1 and m.total == 2
    assert pair_matrix([seq(iv(2))]).total == 0
    assert pair_matrix([seq(iv(2), iv(2))]).total == 0


def test_pair_matrix_silence_breaks_chain():
    m = pair_matrix([seq(iv(2), None, iv(4), iv(-4))])
    assert m.total == 1 and m.directed[4, 4] == 1


def test_pair_matrix_mode_mismatch():
    with pytest.raises(ModeMismatch):
        pair_matrix([seq(iv(1)), seq(iv(1), mode="harmonic")])
    with pytest.raises(ModeMismatch):
        pair_matrix([seq(iv(1))], mode="harmonic")


def test_pair_total_brute_force():
    rng = random.Random(2)
    for _ in range(200):
        tokens = [rng.choice([None, iv(2), iv(-3), iv(7), iv(0)]) for _ in range(rng.randint(0, 30))]
        # segments of consecutive non-silent runs
        runs = [t for t, _ in rle_encode(seq(*tokens)).runs]
        expected = 0
        segment = 0
        for t in runs + [None]:
            if t is None:
                expected += max(0, segment - 1)
                segment = 0
            else:
                segment += 1
        m = pair_matrix([seq(*tokens)])
        assert m.total == expected
        assert np.array_equal(m.undirected, m.undirected.T)
        off = m.directed + m.directed.T
        assert np.array_equal(np.diag(m.undirected), np.diag(m.directed))
        assert np.array_equal(m.undirected - np.diag(np.diag(m.undirected)), off - np.diag(np.diag(off)))


def test_simultaneous_pairs():
    a = seq(iv(4), iv(4), iv(7), mode="harmonic")
    b = seq(iv(7), iv(7), None, mode="harmonic")
    m = simultaneous_pair_matrix([a, b])
    assert m[4, 7] == 1 and m[7, 4] == 1 and m.sum() == 2


# ---------------------------------------------------------------- per piece / aggregate

def test_piece_sequences_pairs_lower_track_as_reference():
    low = from_melody([48] * 4)
    mid = from_melody([-1] * 4)
    high = from_melody([55] * 4)
    melodic, harmonic = piece_sequences([low, mid, high])
    assert len(melodic) == 3
    assert len(harmonic) == 1
    assert harmonic[0].reference == "0" and harmonic[0].tokens[0] == iv(7)


def test_aggregate_sum_then_ratio():
    fa1 = FileAnalysis("a/x.mid", melodic_hist=Counter({iv(1): 1, iv(2): 1}))
    fa2 = FileAnalysis("a/y.mid", melodic_hist=Counter({iv(1): 3, iv(2): 1}))
    stats = aggregate_by_composer([fa1, fa2], lambda fa: fa.path.split("/")[0])
    assert stats["a"].melodic.r_min_maj == pytest.approx(4 / 6)
    assert stats[ALL].n_files == 2
    single = aggregate_by_composer([fa1], lambda fa: "solo")
    assert single["solo"].melodic_hist == fa1.melodic_hist
    empty = aggregate_by_composer([], lambda fa: "x")
    assert list(empty) == [ALL] and empty[ALL].melodic.r_min_maj is None


def test_composer_from_path():
    assert composer_from_path("/data/midi/Bach/bwv1.mid", "/data/midi") == "Bach"
    assert composer_from_path("/data/midi/Bach/sub/x.mid", "/data/midi") == "Bach"
    assert composer_from_path("/data/midi/x.mid", "/data/midi") == "_root"


def test_transposition_invariance_small():
    rng = random.Random(4)
    rolls = [from_melody(random_line(rng, 120, low=40, high=90)) for _ in range(3)]
    base = analyze_rolls(rolls)
    moved = analyze_rolls([r.transpose(-5) for r in rolls])
    assert base.melodic_hist == moved.melodic_hist
    assert base.harmonic_hist == moved.harmonic_hist
    assert base.melodic_pairs == moved.melodic_pairs
    assert base.harmonic_pairs == moved.harmonic_pairs


def test_aggregation_is_order_independent():
    rng = random.Random(8)
    files = [analyze_rolls([from_melody(random_line(rng, 60)) for _ in range(2)], path=f"c{i % 3}/f{i}") for i in range(9)]
    label = lambda fa: fa.path.split("/")[0]  # noqa: E731
    forward = aggregate_by_composer(files, label)
    backward = aggregate_by_composer(files[::-1], label)
    for key in forward:
        assert forward[key].melodic_hist == backward[key].melodic_hist
        assert forward[key].harmonic_pairs == backward[key].harmonic_pairs

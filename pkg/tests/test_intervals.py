import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from intervalembed.intervals import (
    CLASS_LABELS,
    IllegalInterval,
    Interval,
    canonical,
    interval_class,
    interval_name,
    interval_to_semitones,
    make_interval_from_pitches,
    respell,
    semitones_to_interval,
    token_from_json,
    token_to_json,
)

# semitones -> (order, type), transcribed from the published Q-table
Q_TABLE = [
    (0, 1, 0),
    (1, 2, -1),
    (2, 2, 1),
    (3, 3, -1),
    (4, 3, 1),
    (5, 4, 0),
    (6, 5, -2),
    (7, 5, 0),
    (8, 6, -1),
    (9, 6, 1),
    (10, 7, -1),
    (11, 7, 1),
]


@pytest.mark.parametrize("semitones,order,itype", Q_TABLE)
def test_table_rows(semitones, order, itype):
    iv = semitones_to_interval(semitones)
    assert (iv.order, iv.itype, iv.octave, iv.descending) == (order, itype, 0, False)


@pytest.mark.parametrize(
    "s,expected",
    [
        (7, Interval(5, 0, 0, False)),
        (0, Interval(1, 0, 0, False)),
        (12, Interval(1, 0, 1, False)),
        (-4, Interval(3, 1, 0, True)),
    ],
)
def test_semitones_to_interval_examples(s, expected):
    assert semitones_to_interval(s) == expected


def test_interval_to_semitones_examples():
    assert interval_to_semitones(Interval(5, -2)) == 6
    assert interval_to_semitones(Interval(1, 0)) == 0
    assert interval_to_semitones(Interval(2, 1, 1, True)) == -14


def test_round_trip_is_exhaustive_bijection():
    seen = set()
    for s in range(-127, 128):
        iv = semitones_to_interval(s)
        assert interval_to_semitones(iv) == s
        seen.add(iv)
    assert len(seen) == 255


def test_never_emits_augmented():
    assert all(semitones_to_interval(s).itype != 2 for s in range(-127, 128))


def test_legality_exhaustive():
    legal = {1: {-2, 0, 2}, 4: {-2, 0, 2}, 5: {-2, 0, 2}, 2: {-2, -1, 1, 2}, 3: {-2, -1, 1, 2}, 6: {-2, -1, 1, 2}, 7: {-2, -1, 1, 2}}
    for order in range(1, 8):
        for itype in range(-2, 3):
            if itype in legal[order]:
                assert isinstance(interval_to_semitones(Interval(order, itype)), int)
            else:
                with pytest.raises(IllegalInterval):
                    interval_to_semitones(Interval(order, itype))


def test_perfect_second_is_rejected():
    with pytest.raises(IllegalInterval):
        Interval(2, 0)


@pytest.mark.parametrize("bad", [dict(order=0, itype=0), dict(order=8, itype=0), dict(order=3, itype=3), dict(order=3, itype=1, octave=-1)])
def test_out_of_range_fields(bad):
    with pytest.raises(IllegalInterval):
        Interval(**bad)


def test_descending_unison_normalizes():
    assert Interval(1, 0, 0, True) == Interval(1, 0, 0, False)
    assert not Interval(1, 0, 0, True).descending
    # an octave keeps its direction
    assert Interval(1, 0, 1, True).descending


def test_pitches():
    assert make_interval_from_pitches(60, 64) == Interval(3, 1)
    assert make_interval_from_pitches(60, 61) == Interval(2, -1)
    assert make_interval_from_pitches(64, 64) == Interval(1, 0)
    assert make_interval_from_pitches(64, 60) == Interval(3, 1, 0, True)
    with pytest.raises(ValueError):
        make_interval_from_pitches(60, 128)


def test_out_of_domain_semitones():
    with pytest.raises(ValueError):
        semitones_to_interval(128)


def test_names():
    assert interval_name(Interval(5, 0)) == "perfect 5th"
    assert interval_name(Interval(1, 0)) == "perfect 1st"
    assert interval_name(Interval(3, 1, 1, True)) == "Maj 3rd +1 octave desc"
    assert interval_name(Interval(2, -1, 0, True)) == "min 2nd desc"
    assert interval_name(Interval(6, -1, 2)) == "min 6th +2 octaves"
    assert CLASS_LABELS[6] == "dim 5th"
    assert len(CLASS_LABELS) == 12


def test_interval_class():
    assert interval_class(semitones_to_interval(-19)) == 7
    assert interval_class(Interval(1, -2, 1)) == 11


def test_respell_partners():
    for s in range(-127, 128):
        iv = semitones_to_interval(s)
        alt = respell(iv)
        assert alt != iv
        assert interval_to_semitones(alt) == s
        assert respell(alt) == iv
        assert canonical(alt) == iv
    assert respell(Interval(2, 1)) == Interval(3, -2)
    assert respell(Interval(7, 1)) == Interval(1, -2, 1)


def test_json_shape():
    iv = Interval(3, 1, 1, True)
    assert token_to_json(iv) == {"order": 3, "type": 1, "octave": 1, "desc": True}
    assert token_to_json(None) is None
    assert json.loads(json.dumps(token_to_json(iv))) == {"order": 3, "type": 1, "octave": 1, "desc": True}


@given(st.integers(-127, 127))
def test_json_round_trip(s):
    iv = semitones_to_interval(s)
    assert token_from_json(json.loads(json.dumps(token_to_json(iv)))) == iv


@given(st.integers(0, 127), st.integers(0, 127))
def test_pitch_interval_adds_back(p, q):
    assert p + interval_to_semitones(make_interval_from_pitches(p, q)) == q

import os
import random
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import midi_builder as mb  # noqa: E402

# A four-bar 4/4 string quartet: (pitch, beats) per part. Every part is
# gapless and no two neighbouring notes move by the same interval, so each
# note is exactly one RLE column.
QUARTET = {
    "violin1": [(76, 2), (74, 1), (71, 1), (72, 2), (77, 2), (76, 1), (79, 1), (77, 2), (76, 4)],
    "violin2": [(67, 4), (69, 2), (72, 2), (71, 4), (67, 2), (64, 2)],
    "viola": [(60, 4), (65, 4), (64, 4), (60, 4)],
    "cello": [(48, 4), (53, 4), (55, 4), (48, 4)],
}
QUARTET_DIVISION = 480


@pytest.fixture
def quartet_bytes():
    parts = [mb.beats_to_notes(p, QUARTET_DIVISION) for p in QUARTET.values()]
    return mb.smf(parts, division=QUARTET_DIVISION, conductor=False)


def random_line(rng, length, low=21, high=108, rest_prob=0.2, max_dur=32):
    """Random monophonic pitch line without back-to-back notes of equal pitch."""
    line = []
    prev = None
    while len(line) < length:
        dur = rng.randint(1, max_dur)
        if rng.random() < rest_prob:
            line.extend([-1] * dur)
            prev = None
            continue
        pitch = rng.randint(low, high)
        while pitch == prev:
            pitch = rng.randint(low, high)
        line.extend([pitch] * dur)
        prev = pitch
    return np.array(line[:length], dtype=np.int64)


@pytest.fixture
def rng():
    return random.Random(20240101)


def write_screening_corpus(root):
    """Twelve files with known screening outcomes; returns {relative path: (verdict, reason)}."""
    expected = {}

    def put(rel, data, verdict, reason):
        path = os.path.join(root, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "wb") as f:
            f.write(data)
        expected[rel] = (verdict, reason)

    twelve_bars = [(60 + (i * 5) % 12, 2) for i in range(24)]
    put("misc/broken.mid", b"XXXX" + bytes(20), "exclude", "parse_error")
    put(
        "misc/two_signatures.mid",
        mb.smf([mb.beats_to_notes(twelve_bars)], time_signatures=((0, 4), (1920, 3))),
        "exclude",
        "multiple_time_signatures",
    )
    put("misc/short.mid", mb.smf([mb.beats_to_notes([(60, 4), (64, 4), (67, 4), (72, 4)])]), "exclude", "too_few_bars")
    put(
        "misc/numerator_one.mid",
        mb.smf([mb.beats_to_notes(twelve_bars)], time_signatures=((0, 1),)),
        "exclude",
        "numerator_one",
    )
    melodies = [
        [62, 64, 65, 67, 69, 67, 65, 64],
        [72, 71, 69, 67, 65, 64, 62, 60],
        [60, 63, 67, 70, 68, 65, 62, 59],
        [55, 59, 62, 65, 64, 60, 57, 53],
    ]
    for k in range(8):
        composer = "bach" if k < 5 else "mozart"
        mel = melodies[k % 4]
        numerator = 3 if k % 3 == 0 else 4
        beats = 12 * numerator
        upper = [(mel[i % 8] + k, 1.5 if i % 2 else 0.5) for i in range(int(beats))]
        lower = [(mel[(i + 3) % 8] - 12, 2) for i in range(int(beats // 2))]
        data = mb.smf([mb.beats_to_notes(upper), mb.beats_to_notes(lower)], time_signatures=((0, numerator),))
        put(f"{composer}/piece{k}.mid", data, "keep", None)
    return expected


# ---------------------------------------------------------------- acceptance summary

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or report.failed:
        key = (marker.args[0], item.name)
        previous = _criteria.get(key)
        if previous is None or previous[0] == "passed":
            _criteria[key] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), (outcome, duration) in sorted(_criteria.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {name} ({duration:.2f}s)")

"""CSV/JSON renderings of corpus results, and atomic file writes."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Dict, Iterable, Optional

import numpy as np

from .corpus import CorpusStats, ScreenReport
from .intervals import CLASS_LABELS

RATIO_COLUMNS = [
    "composer",
    "f_min",
    "f_Maj",
    "r_min_maj_melodic",
    "r_min_maj_harmonic",
    "f_dsc",
    "f_asc",
    "r_dsc_asc",
    "f_min_harmonic",
    "f_Maj_harmonic",
    "n_files",
]


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def screening_csv(reports: Iterable[ScreenReport]) -> str:
    rows = [(r.path or "", r.verdict, r.reason or "", str(r.bars)) for r in reports]
    return _csv(rows, ["path", "verdict", "reason", "bars"])


def screening_json(reports: Iterable[ScreenReport]) -> str:
    docs = [
        {"path": r.path, "verdict": r.verdict, "reason": r.reason, "bars": str(r.bars), "bars_float": float(r.bars)}
        for r in reports
    ]
    return json.dumps(docs, indent=1)


def ratio_rows(stats: Dict[str, CorpusStats]):
    for label, st in stats.items():
        mel, har = st.melodic, st.harmonic
        yield {
            "composer": label,
            "f_min": mel.f_min,
            "f_Maj": mel.f_maj,
            "r_min_maj_melodic": mel.r_min_maj,
            "r_min_maj_harmonic": har.r_min_maj,
            "f_dsc": mel.f_dsc,
            "f_asc": mel.f_asc,
            "r_dsc_asc": mel.r_dsc_asc,
            "f_min_harmonic": har.f_min,
            "f_Maj_harmonic": har.f_maj,
            "n_files": st.n_files,
        }


def ratios_csv(stats: Dict[str, CorpusStats]) -> str:
    rows = []
    for row in ratio_rows(stats):
        rows.append([_fmt(v) if k.startswith("r_") else v for k, v in row.items()])
    return _csv(rows, RATIO_COLUMNS)


def ratios_json(stats: Dict[str, CorpusStats]) -> str:
    return json.dumps(list(ratio_rows(stats)), indent=1)


def matrix_csv(matrix: np.ndarray) -> str:
    rows = [[label, *map(int, row)] for label, row in zip(CLASS_LABELS, np.asarray(matrix))]
    return _csv(rows, ["", *CLASS_LABELS])


def matrices_dict(stats: Dict[str, CorpusStats]) -> dict:
    out = {"labels": list(CLASS_LABELS), "composers": {}}
    for label, st in stats.items():
        out["composers"][label] = {
            "melodic": st.melodic_pairs.directed.tolist(),
            "melodic_undirected": st.melodic_pairs.undirected.tolist(),
            "harmonic": st.harmonic_pairs.directed.tolist(),
            "harmonic_undirected": st.harmonic_pairs.undirected.tolist(),
            "harmonic_simultaneous": st.simultaneous.tolist(),
        }
    return out


def matrix_files(stats: Dict[str, CorpusStats]) -> Dict[str, str]:
    """File name -> CSV text for every composer's matrices."""
    files = {}
    for label, views in matrices_dict(stats)["composers"].items():
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in label)
        for kind, matrix in views.items():
            files[f"{safe}__{kind}.csv"] = matrix_csv(np.array(matrix))
    return files

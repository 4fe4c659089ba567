"""Command-line entry point: ``iemb {ingest,encode,decode,screen,analyze}``."""
from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from . import corpus, embedder, midi, pianoroll, reports
from .embedder import MODES

MIDI_SUFFIXES = (".mid", ".midi")
ENV_PREFIX = "IEMB_"

EXIT_OK, EXIT_ERROR, EXIT_UNHEALTHY = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    resolution: int = pianoroll.DEFAULT_RESOLUTION
    mode: str = "melodic"
    rle: bool = False
    origin: Optional[int] = None
    velocity: int = embedder.DEFAULT_VELOCITY
    out: Optional[str] = None
    format: str = "json"
    jobs: int = 1
    corpus_root: Optional[str] = None
    reference: Optional[str] = None
    numerator: Optional[int] = None

    def validate(self):
        if self.resolution < 1:
            raise ConfigError(f"--resolution must be >= 1, got {self.resolution}")
        if self.origin is not None and not 0 <= self.origin <= 127:
            raise ConfigError(f"--origin must be a MIDI pitch 0..127, got {self.origin}")
        if not 1 <= self.velocity <= 127:
            raise ConfigError(f"--velocity must be in 1..127, got {self.velocity}")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {self.jobs}")
        if self.numerator is not None and self.numerator < 1:
            raise ConfigError(f"--numerator must be >= 1, got {self.numerator}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")


def _env_int(name, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from None


def _err(msg):
    print(f"iemb: {msg}", file=sys.stderr)


def expand_inputs(inputs, suffixes=None) -> List[str]:
    """Resolve paths, directories (recursive) and glob patterns into a sorted-per-entry file list."""
    found = []
    for entry in inputs:
        if os.path.isdir(entry):
            wanted = suffixes or MIDI_SUFFIXES
            hits = [str(p) for p in Path(entry).rglob("*") if p.is_file() and p.suffix.lower() in wanted]
            found.extend(sorted(hits))
        elif any(ch in entry for ch in "*?["):
            found.extend(sorted(glob.glob(entry, recursive=True)))
        else:
            found.append(entry)
    return found


def _is_midi(path):
    return path.lower().endswith(MIDI_SUFFIXES)


def _load_roll(path, resolution):
    text = Path(path).read_text(encoding="utf-8")
    if path.lower().endswith(".csv"):
        return pianoroll.from_csv(text, resolution)
    return pianoroll.from_json(text)


def _roll_text(roll, fmt):
    return pianoroll.to_csv(roll) if fmt == "csv" else pianoroll.to_json(roll)


def _seq_text(seq, fmt):
    return embedder.sequence_to_csv(seq) if fmt == "csv" else embedder.sequence_to_json(seq)


def _stem(path):
    name = os.path.basename(path)
    for suffix in (".json", ".csv", ".midi", ".mid", ".MID", ".MIDI"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return os.path.splitext(name)[0]


# ---------------------------------------------------------------- commands

def cmd_ingest(cfg: RunConfig) -> int:
    out = cfg.out or "."
    failures = 0
    for path in expand_inputs(cfg.inputs):
        try:
            rolls = midi.to_pianorolls(midi.read_midi(path), cfg.resolution)
        except (midi.MalformedFile, OSError) as exc:
            _err(f"{path}: {exc}")
            failures += 1
            continue
        for i, roll in enumerate(rolls):
            reports.write_atomic(
                os.path.join(out, f"{_stem(path)}.track{i}.{cfg.format}"), _roll_text(roll, cfg.format)
            )
    return EXIT_ERROR if failures else EXIT_OK


def _encode_rolls(cfg, rolls, numerator):
    """Return (suffix, sequence) pairs for one input."""
    if cfg.mode == "melodic":
        return [(f"track{i}", embedder.melodic_from_pianoroll(r)) for i, r in enumerate(rolls)]
    if cfg.mode == "barline":
        bar_length = cfg.resolution * (cfg.numerator or numerator)
        return [(f"track{i}", embedder.barline_from_pianoroll(r, bar_length)) for i, r in enumerate(rolls)]
    _, harmonic = corpus.piece_sequences(rolls)
    voiced = [i for i, r in enumerate(rolls) if r.grid.any()]
    pairs = [(i, j) for n, i in enumerate(voiced) for j in voiced[n + 1 :]]
    return [(f"pair{i}-{j}", seq) for (i, j), seq in zip(pairs, harmonic)]


def cmd_encode(cfg: RunConfig) -> int:
    out = cfg.out or "."
    failures = 0
    for path in expand_inputs(cfg.inputs):
        try:
            if _is_midi(path):
                piece = midi.read_midi(path)
                rolls = midi.to_pianorolls(piece, cfg.resolution)
                numerator = piece.time_signatures[0].numerator if piece.time_signatures else 4
                encoded = _encode_rolls(cfg, rolls, numerator)
            else:
                roll = _load_roll(path, cfg.resolution)
                if cfg.mode == "harmonic":
                    if not cfg.reference:
                        raise ConfigError("harmonic encoding of a pianoroll needs --reference")
                    ref = _load_roll(cfg.reference, cfg.resolution)
                    encoded = [(None, embedder.harmonic_from_pianorolls(roll, ref, reference_id=_stem(cfg.reference)))]
                elif cfg.mode == "barline":
                    bar_length = roll.resolution * (cfg.numerator or 4)
                    encoded = [(None, embedder.barline_from_pianoroll(roll, bar_length))]
                else:
                    encoded = [(None, embedder.melodic_from_pianoroll(roll))]
        except (midi.MalformedFile, OSError, ValueError) as exc:
            _err(f"{path}: {exc}")
            failures += 1
            continue
        for suffix, seq in encoded:
            if cfg.rle:
                seq = embedder.rle_encode(seq)
            parts = [_stem(path)] + ([suffix] if suffix else []) + [cfg.mode, cfg.format]
            reports.write_atomic(os.path.join(out, ".".join(parts)), _seq_text(seq, cfg.format))
    return EXIT_ERROR if failures else EXIT_OK


def _load_sequence(path, cfg):
    text = Path(path).read_text(encoding="utf-8")
    if path.lower().endswith(".csv"):
        return embedder.sequence_from_csv(text, cfg.mode, cfg.resolution, rle=cfg.rle)
    return embedder.sequence_from_json(text)


def cmd_decode(cfg: RunConfig) -> int:
    out = cfg.out or "."
    failures = 0
    reference = None
    for path in expand_inputs(cfg.inputs, suffixes=(".json", ".csv")):
        try:
            seq = _load_sequence(path, cfg)
            if seq.mode == "melodic":
                roll = embedder.pianoroll_from_melodic(seq, cfg.origin, cfg.velocity)
            elif seq.mode == "barline":
                roll = embedder.pianoroll_from_barline(seq, velocity=cfg.velocity)
            else:
                if not cfg.reference:
                    raise ConfigError("harmonic decoding needs --reference")
                if reference is None:
                    reference = _load_roll(cfg.reference, cfg.resolution)
                roll = embedder.pianoroll_from_harmonic(seq, reference, cfg.velocity)
        except (OSError, ValueError, KeyError) as exc:
            _err(f"{path}: {exc}")
            failures += 1
            continue
        reports.write_atomic(os.path.join(out, f"{_stem(path)}.roll.{cfg.format}"), _roll_text(roll, cfg.format))
    return EXIT_ERROR if failures else EXIT_OK


def _corpus_inputs(cfg):
    inputs = list(cfg.inputs)
    if cfg.corpus_root and not inputs:
        inputs = [cfg.corpus_root]
    if not inputs:
        raise ConfigError("no input files (give paths or --corpus-root)")
    return expand_inputs(inputs)


def cmd_screen(cfg: RunConfig) -> int:
    results = [corpus.screen_path(p, cfg.resolution)[0] for p in _corpus_inputs(cfg)]
    text = reports.screening_json(results) if cfg.format == "json" else reports.screening_csv(results)
    if cfg.out:
        reports.write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    paths = _corpus_inputs(cfg)
    run = corpus.analyze_corpus(paths, root=cfg.corpus_root, resolution=cfg.resolution, jobs=cfg.jobs)
    out = cfg.out or "analysis"
    for report in run.screening:
        if report.reason == corpus.PARSE_ERROR:
            _err(f"{report.path}: excluded, {report.detail}")
    reports.write_atomic(os.path.join(out, "screening.csv"), reports.screening_csv(run.screening))
    if cfg.format == "csv":
        reports.write_atomic(os.path.join(out, "ratios.csv"), reports.ratios_csv(run.stats))
        for name, text in reports.matrix_files(run.stats).items():
            reports.write_atomic(os.path.join(out, "matrices", name), text)
    else:
        reports.write_atomic(os.path.join(out, "ratios.json"), reports.ratios_json(run.stats))
        reports.write_atomic(
            os.path.join(out, "matrices.json"), json.dumps(reports.matrices_dict(run.stats), indent=1)
        )
    everything = run.stats[corpus.ALL]
    kept = sum(r.kept for r in run.screening)
    print(f"files: {len(run.screening)} screened, {kept} kept")
    for name, value in (
        ("harmonic minor/Major ratio", everything.harmonic.r_min_maj),
        ("melodic minor/Major ratio", everything.melodic.r_min_maj),
        ("melodic descending/ascending ratio", everything.melodic.r_dsc_asc),
    ):
        print(f"{name}: {'n/a' if value is None else f'{value:.4f}'}")
    if run.excluded_fraction > 0.5:
        _err(f"warning: {run.excluded_fraction:.0%} of files were excluded by screening")
        return EXIT_UNHEALTHY
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "screen": cmd_screen,
    "analyze": cmd_analyze,
}


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_ERROR
    except OSError as exc:
        _err(f"{getattr(exc, 'filename', '') or ''}: {exc}")
        return EXIT_ERROR


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iemb", description="Interval embeddings for symbolic music.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="*", help="files, directories or glob patterns")
    common.add_argument("--resolution", type=int, default=None, help="timesteps per beat (default 24)")
    common.add_argument("--out", default=None, help="output directory (file for screen)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    codec = argparse.ArgumentParser(add_help=False)
    codec.add_argument("--mode", choices=MODES, default="melodic")
    codec.add_argument("--rle", action="store_true", help="run-length encode the sequences")
    codec.add_argument("--reference", default=None, help="reference pianoroll for harmonic mode")

    sub.add_parser("ingest", parents=[common], help="MIDI to pianoroll files")
    enc = sub.add_parser("encode", parents=[common, codec], help="pianoroll or MIDI to interval sequences")
    enc.add_argument("--numerator", type=int, default=None, help="beats per bar for barline mode")
    dec = sub.add_parser("decode", parents=[common, codec], help="interval sequences to pianorolls")
    dec.add_argument("--origin", type=int, default=None, help="first pitch of a melodic decode")
    dec.add_argument("--velocity", type=int, default=embedder.DEFAULT_VELOCITY)
    for name, text in (("screen", "screen a corpus"), ("analyze", "full corpus statistics")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--corpus-root", default=None)
        p.add_argument("--jobs", type=int, default=None, help="worker processes (default: logical cores)")
    return parser


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    resolution = args.resolution if args.resolution is not None else _env_int("RESOLUTION", pianoroll.DEFAULT_RESOLUTION)
    jobs = getattr(args, "jobs", None)
    if jobs is None:
        jobs = _env_int("JOBS", os.cpu_count() or 1)
    return RunConfig(
        command=args.command,
        inputs=args.inputs,
        resolution=resolution,
        mode=getattr(args, "mode", "melodic"),
        rle=getattr(args, "rle", False),
        origin=getattr(args, "origin", None),
        velocity=getattr(args, "velocity", embedder.DEFAULT_VELOCITY),
        out=args.out,
        format=args.format,
        jobs=jobs,
        corpus_root=getattr(args, "corpus_root", None),
        reference=getattr(args, "reference", None),
        numerator=getattr(args, "numerator", None),
    )


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

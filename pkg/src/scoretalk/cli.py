"""Command-line entry points: interactive conversation, batch editing,
format conversion, and the HTTP service.

Exit codes: 0 success, 2 usage, 3 file or command parse problems,
4 command execution failures.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import commands, ingest, model
from .errors import CommandParseError, IngestError, ScoreTalkError
from .model import NOTE, ScoreMeta, TimedEvent
from .session import Outcome, Session

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_COMMAND = 4

ROLL_CELL_BEATS = 0.25


def render_roll(events: list[TimedEvent], meta: ScoreMeta) -> str:
    """ASCII piano roll: one row per pitch present, quarter-beat columns."""
    notes = [e for e in events if e.kind == NOTE]
    if not notes:
        return "(empty score)"
    total = max(e.end_beats for e in notes)
    columns = max(1, math.ceil(total / ROLL_CELL_BEATS - model.BEAT_EPS))
    pitches = sorted({e.pitch_number for e in notes}, reverse=True)
    rows = []
    for pn in pitches:
        cells = [" "] * columns
        for e in notes:
            if e.pitch_number != pn:
                continue
            first = int(round(e.onset_beats / ROLL_CELL_BEATS))
            last = int(round(e.end_beats / ROLL_CELL_BEATS))
            for i in range(first, min(last, columns)):
                cells[i] = "#"
        label = model.pitch_label(pn, meta.octave_offset_k)
        rows.append(f"{label:>4} |{''.join(cells)}|")
    per_measure = int(round(meta.beats_per_measure / ROLL_CELL_BEATS))
    axis = "".join("|" if per_measure and i % per_measure == 0 else "-" for i in range(columns))
    rows.append(f"{'':>4} +{axis}+")
    return "\n".join(rows)


def _print_outcome(outcome: Outcome, out):
    if outcome.echo:
        print(f"C: {outcome.echo}", file=out)
    if outcome.status == "applied":
        print(f"   {outcome.message}", file=out)
    elif outcome.status == "ambiguous":
        print(f"   {outcome.message}; enter a number to choose:", file=out)
        for c in outcome.candidates:
            print(f"     [{c.index}] {c.describe}", file=out)
    else:
        print(f"   error: {outcome.message}", file=out)


def run_repl(session: Session, stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    interactive = getattr(stdin, "isatty", lambda: False)()
    while True:
        stdout.write("U: ")
        stdout.flush()
        line = stdin.readline()
        if not line:
            break
        text = line.strip()
        if not interactive:
            stdout.write(text + "\n")
        if not text:
            continue
        lowered = text.lower().rstrip(".")
        if lowered in ("quit", "exit"):
            break
        if lowered.startswith("save "):
            target = text[5:].strip()
            if session.score is None:
                print("   error: no score loaded", file=stdout)
                continue
            try:
                ingest.save_path(session.score, session.meta, target)
                print(f"   saved {target}", file=stdout)
            except ScoreTalkError as exc:
                print(f"   error: {exc}", file=stdout)
            continue
        if text.isdigit() and session.pending is not None:
            _print_outcome(session.resolve_choice(int(text)), stdout)
            continue
        if lowered == "show":
            print(render_roll(session.events(), session.meta), file=stdout)
        outcome = session.apply_command(text)
        _print_outcome(outcome, stdout)
    return EXIT_OK


def _load_session(path: str) -> Session:
    music, meta, report = ingest.load_path(path)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    session = Session()
    session.load(music, meta)
    return session


def cmd_repl(args) -> int:
    session = Session()
    if args.file:
        try:
            session = _load_session(args.file)
        except ScoreTalkError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
    return run_repl(session)


def cmd_apply(args) -> int:
    try:
        session = _load_session(args.file)
    except ScoreTalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for text in args.command:
        try:
            commands.parse_command(text)
        except CommandParseError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        outcome = session.apply_command(text)
        if outcome.echo:
            print(f"C: {outcome.echo}")
        if outcome.status == "ambiguous":
            print("error: ambiguous in batch mode", file=sys.stderr)
            return EXIT_COMMAND
        if outcome.status != "applied":
            print(f"error: {outcome.message}", file=sys.stderr)
            return EXIT_COMMAND
    try:
        ingest.save_path(session.score, session.meta, args.out)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_convert(args) -> int:
    try:
        ingest.detect_format(args.out)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        music, meta, report = ingest.load_path(args.src)
    except ScoreTalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    try:
        ingest.save_path(music, meta, args.out)
    except ScoreTalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host = os.environ.get("SCORETALK_HOST", args.host)
    port = int(os.environ.get("SCORETALK_PORT", args.port))
    uvicorn.run(create_app(), host=host, port=port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scoretalk", description="Conversational score editing")
    sub = parser.add_subparsers(dest="cmd", required=True)

    repl = sub.add_parser("repl", help="interactive conversation")
    repl.add_argument("--file", help="score to load (.mid/.musicxml/.json)")
    repl.set_defaults(func=cmd_repl)

    apply_parser = sub.add_parser("apply", help="apply commands in batch")
    apply_parser.add_argument("--file", required=True)
    apply_parser.add_argument("--command", action="append", required=True)
    apply_parser.add_argument("--out", required=True)
    apply_parser.set_defaults(func=cmd_apply)

    convert = sub.add_parser("convert", help="convert between score formats")
    convert.add_argument("--in", dest="src", required=True)
    convert.add_argument("--out", required=True)
    convert.set_defaults(func=cmd_convert)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

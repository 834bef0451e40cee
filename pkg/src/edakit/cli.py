"""Command-line entry points: serve the session service, run batch
pipelines, replay exported event logs.

Exit codes: 0 success, 1 I/O, 2 validation, 3 protocol/bind.
"""

from __future__ import annotations

import argparse
import errno
import json
import logging
import sys

from .errors import DataError, EdakitError, FilterError
from .pipeline import PipelineConfig, run_pipeline, run_replay

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_PROTOCOL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edakit",
        description="Collaborative EDA engine: session service and batch analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the websocket session service")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data", help="CSV to preload as solution 0")
    serve.add_argument("--slots", type=int, default=15, help="screen slot count")
    serve.add_argument("--ui", help="static directory to serve at / (the browser client)")

    analyze = sub.add_parser("analyze", help="run a batch pipeline config")
    analyze.add_argument("--config", required=True, help="pipeline JSON file")
    analyze.add_argument("--out", required=True, help="artifact output directory")
    analyze.add_argument("--seed", type=int, help="default seed for cluster steps")

    rep = sub.add_parser("replay", help="replay an exported event log")
    rep.add_argument("--log", required=True, help="events JSON file")
    rep.add_argument("--out", required=True, help="artifact output directory")
    return parser


def _cmd_serve(args) -> int:
    import uvicorn

    from .dataset import load_csv
    from .server import build_app
    from .session import Event, new_session

    if args.data:
        try:
            dataset = load_csv(args.data)
        except DataError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        # an empty placeholder dataset; clients usually preload via --data
        from .dataset import Column, Dataset
        import numpy as np

        dataset = Dataset(
            name="(empty)",
            columns=(
                Column("value", "numeric", np.zeros(0), np.zeros(0, dtype=bool)),
            ),
        )
    state = new_session(dataset, slot_count=args.slots)
    preload = (
        [Event(type="create_solution", client_id="server", seq=0)] if args.data else []
    )
    app = build_app(state, ui_dir=args.ui, preload_events=preload)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except SystemExit as exc:  # uvicorn exits 1 on bind failure
        if exc.code:
            print(f"error: could not serve on {args.host}:{args.port}", file=sys.stderr)
            return EXIT_PROTOCOL
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            print(f"error: bind failed: {exc}", file=sys.stderr)
            return EXIT_PROTOCOL
        raise
    return EXIT_OK


def _cmd_analyze(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        config = PipelineConfig.from_document(doc)
        written = run_pipeline(config, args.out, seed=args.seed)
    except DataError as exc:
        # ingestion problems are I/O unless they are schema violations
        msg = str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_IO if "cannot read" in msg or "empty file" in msg else EXIT_VALIDATION
    except (EdakitError, FilterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_replay(args) -> int:
    try:
        written = run_replay(args.log, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: log is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EdakitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for path in written:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "analyze":
        return _cmd_analyze(args)
    return _cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())

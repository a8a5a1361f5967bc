"""Command line entry points: serve the HTTP API, play a terminal session, run scripts."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .scripts import load_scenario, run_script
from .service import BuilderService, create_app
from .world import DEFAULT_DIMS


def _parse_dims(text: str) -> tuple[int, int, int]:
    parts = text.lower().replace("x", " ").split()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("dims must look like 11x9x11")
    return tuple(int(p) for p in parts)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blocksmith",
                                     description="Interactive building agent")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service with an event stream")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--repo-file", type=Path, default=None,
                       help="persist learned structures to this file")
    serve.add_argument("--transcript-dir", type=Path, default=Path("transcripts"))
    serve.add_argument("--ui-dir", type=Path, default=None,
                       help="serve a built browser client from /ui")

    play = sub.add_parser("play", help="terminal chat session (same loop, stdin/stdout)")
    play.add_argument("--repo-file", type=Path, default=None)
    play.add_argument("--dims", type=_parse_dims, default=DEFAULT_DIMS)
    play.add_argument("--transcript-dir", type=Path, default=None)
    play.add_argument("--target-file", type=Path, default=None,
                      help="JSON block list shown to the architect only")

    run = sub.add_parser("run-script", help="execute a scenario file; nonzero on failure")
    run.add_argument("scenario", type=Path)
    run.add_argument("--repo-file", type=Path, default=None)
    run.add_argument("--quiet", action="store_true")
    return parser


def cmd_serve(args) -> int:
    import uvicorn

    service = BuilderService(repo_file=args.repo_file,
                             transcript_dir=args.transcript_dir)
    app = create_app(service, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_play(args) -> int:
    service = BuilderService(repo_file=args.repo_file,
                             transcript_dir=args.transcript_dir)
    target = None
    if args.target_file:
        target = json.loads(args.target_file.read_text())
        print("[target structure]")
        for record in target:
            print(f"  {record['color']} at ({record['x']}, {record['y']}, {record['z']})")
    session = service.create_session(args.dims, target)
    for event in session.events.since(0):
        if event["type"] == "say":
            print(f"builder> {event['text']}")
    while True:
        try:
            line = input("you> ").strip()
        except (EOFError, KeyboardInterrupt):
            print()
            session.manager.end_session()
            return 0
        if not line:
            continue
        if line in {"/quit", "/exit"}:
            session.manager.end_session()
            return 0
        result = session.post_message(line)
        for reply in result["replies"]:
            print(f"builder> {reply}")


def cmd_run_script(args) -> int:
    steps = load_scenario(args.scenario)
    result = run_script(steps, repo_file=args.repo_file)
    if not args.quiet:
        for line in result.transcript:
            print(line)
    if result.passed:
        print(f"PASS {args.scenario}")
        return 0
    print(f"FAIL {args.scenario}: {result.failure}")
    return 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "play": cmd_play,
        "run-script": cmd_run_script,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

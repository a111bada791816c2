"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 input error (bad config, missing files), 2 stage failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .onet import TaxonomyError
from .pipeline import InputError, StageError, run_pipeline, run_stage

logger = logging.getLogger("jobskills")

EXIT_OK, EXIT_INPUT, EXIT_STAGE = 0, 1, 2


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="JSON config file")
    parser.add_argument("--seed", type=int, default=default, help="override the master seed")
    parser.add_argument("--out", default=default, help="output directory (overrides the config)")
    parser.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="log progress at INFO level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jobskills", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    parent = argparse.ArgumentParser(add_help=False)
    _common(parent, suppress=True)
    helps = {
        "ingest": "parse the corpus into postings",
        "filter": "drop postings that only mention the anchor in an irrelevant way",
        "dedup": "remove near-duplicate postings",
        "extract": "fill salary, degree, experience, location and contract fields",
        "match": "match titles to the taxonomy (cosine, then fuzzy)",
        "train": "train the description classifier and assign every posting",
        "topics": "extract anchor contexts and fit the LDA grid",
        "centrality": "family-by-topic centrality matrix",
        "report": "build and emit report tables",
        "pipeline": "run every stage in order",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[parent], help=text)
        if name == "topics":
            p.add_argument("--contexts", help="fit on this context file instead of extracting from postings")
    fx = sub.add_parser("fixture", parents=[parent], help="write a synthetic corpus with planted structure")
    fx.add_argument("--kind", choices=("paper", "topics", "two-topic"), default="paper")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "fixture":
            from .fixtures import write_fixture

            out = Path(args.out or "fixture")
            manifest = write_fixture(out, args.seed or 0, args.kind)
            n = manifest.get("n_records", len(manifest.get("labels", [])))
            print(f"wrote {args.kind} fixture ({n} documents) to {out}")
            return EXIT_OK
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        out = Path(args.out) if args.out else cfg.path("output_dir")
        if args.command == "pipeline":
            run_pipeline(cfg, out)
            print(f"report written to {out / 'report'}")
        else:
            extra = {"contexts_path": args.contexts} if args.command == "topics" and args.contexts else {}
            result = run_stage(args.command, cfg, out, **extra)
            if isinstance(result, dict):
                print(" ".join(f"{k}={v}" for k, v in sorted(result.items()) if not isinstance(v, dict)))
            else:
                print(f"{args.command} done")
        return EXIT_OK
    except (ConfigError, InputError, TaxonomyError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StageError as exc:
        cause = exc.__cause__
        if isinstance(cause, (InputError, TaxonomyError, FileNotFoundError)):
            print(f"input error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        print(f"stage failed: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())

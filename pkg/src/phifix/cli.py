"""Command-line entry point.

Exit codes: 0 when every expectation passes and the scan finds no soundness
violation, 1 on an expectation failure or soundness violation, 2 when a
scenario cannot be parsed or validated.
"""
from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path
from typing import Optional

from . import __version__
from .certify import ScanConfig, ScanReport, TheoremId, scan_random
from .pwdsl import ParseError
from .report import (TOOL, corpus_data, corpus_text, dumps, jsonable, report_data,
                     report_text, run, run_corpus)
from .scenario import ValidationError, load_scenario
from .space import DEFAULT_ANGULAR_N, SpaceError

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2
GALLERY_EXAMPLES = 20


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description="Check phi-fixed circles and discs "
                                "and the contraction theorems that produce them.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run one scenario file")
    a.add_argument("file")
    a.add_argument("--json", action="store_true", help="machine-readable output")
    a.add_argument("--tol", type=_positive_float, default=None)
    a.add_argument("--step", type=_positive_float, default=None,
                   help="resample every continuous carrier segment with this step")
    a.add_argument("--angular", type=_positive_int, default=DEFAULT_ANGULAR_N,
                   help="samples per circle on complex carriers")

    c = sub.add_parser("corpus", help="run every bundled scenario")
    c.add_argument("--json", action="store_true")
    c.add_argument("--tol", type=_positive_float, default=None)

    s = sub.add_parser("scan", help="certify all theorems on random finite spaces")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--max-points", type=int, default=8)
    s.add_argument("--anchors", type=_positive_int, default=2)
    s.add_argument("--scale", type=_positive_float, default=1.0,
                   help="distance unit of generated spaces")
    s.add_argument("--json", action="store_true")
    s.add_argument("--gallery", default="scan_gallery.json",
                   help="where to write every finding (default: %(default)s)")
    s.add_argument("--no-gallery", action="store_true")
    return p


def _error(exc: Exception, path: Optional[str] = None) -> int:
    where = f"{path}: " if path else ""
    print(f"{TOOL}: {where}{type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_INVALID


def cmd_analyze(args) -> int:
    try:
        scenario = load_scenario(args.file)
    except (ParseError, ValidationError, SpaceError, OSError, UnicodeDecodeError) as exc:
        return _error(exc, args.file)
    report = run(scenario, tol=args.tol, step=args.step, angular_n=args.angular)
    data = report_data(report)
    sys.stdout.write(dumps(data) + "\n" if args.json else report_text(data))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_corpus(args) -> int:
    try:
        reports = run_corpus(tol=args.tol)
    except (ParseError, ValidationError, SpaceError) as exc:
        return _error(exc)
    data = corpus_data(reports, args.tol)
    sys.stdout.write(dumps(data) + "\n" if args.json else corpus_text(data))
    return EXIT_OK if data["summary"]["ok"] else EXIT_FAILED


def scan_data(report: ScanReport, gallery: Optional[str]) -> dict:
    per = {t.label: {"soundness_violations": 0, "converse_failures": 0} for t in TheoremId}
    for f in report.soundness_violations:
        per[f.theorem.label]["soundness_violations"] += 1
    for f in report.converse_failures:
        per[f.theorem.label]["converse_failures"] += 1
    failed = Counter(h for f in report.converse_failures for h in f.failed_hypotheses)
    cfg = report.config
    return {
        "tool": {"name": TOOL, "version": __version__},
        "params": {"seed": report.seed, "trials": cfg.trials, "max_points": cfg.max_points,
                   "anchors": cfg.anchors, "scale": cfg.scale},
        "trials": report.trials,
        "certifications": report.certifications,
        "sound": report.sound,
        "soundness_violations": [jsonable(f.as_dict()) for f in report.soundness_violations],
        "converse_failures": len(report.converse_failures),
        "converse_failed_hypotheses": dict(sorted(failed.items())),
        "by_theorem": per,
        "converse_examples": [jsonable(f.as_dict())
                              for f in report.converse_failures[:GALLERY_EXAMPLES]],
        "gallery": gallery,
    }


def scan_text(data: dict) -> str:
    p = data["params"]
    lines = [f"scan seed={p['seed']} trials={p['trials']} max_points={p['max_points']} "
             f"anchors={p['anchors']} scale={p['scale']!r}  ({TOOL} {data['tool']['version']})",
             f"certifications: {data['certifications']}",
             f"soundness violations: {len(data['soundness_violations'])}",
             f"converse failures: {data['converse_failures']}"]
    if data["converse_failed_hypotheses"]:
        lines.append("  failing hypotheses: " + ", ".join(
            f"{k} {v}" for k, v in data["converse_failed_hypotheses"].items()))
    lines.append("by theorem (violations / converse failures):")
    for label, c in data["by_theorem"].items():
        lines.append(f"  {label:16s} {c['soundness_violations']:5d} {c['converse_failures']:7d}")
    for v in data["soundness_violations"]:
        lines.append(f"VIOLATION trial {v['trial']} [{v['scenario']}] {v['theorem']} "
                     f"x0={v['x0']!r} k={v['k']!r} r={v['radius']!r}: {v['violations']}")
    if data["gallery"]:
        lines.append(f"gallery written to {data['gallery']}")
    return "\n".join(lines) + "\n"


def cmd_scan(args) -> int:
    try:
        config = ScanConfig(trials=args.trials, max_points=args.max_points,
                            anchors=args.anchors, scale=args.scale)
    except ValueError as exc:
        return _error(exc)
    report = scan_random(config, args.seed)
    gallery = None if args.no_gallery else args.gallery
    if gallery:
        full = {"params": {"seed": args.seed, "trials": config.trials,
                           "max_points": config.max_points, "anchors": config.anchors,
                           "scale": config.scale},
                "soundness_violations": [jsonable(f.as_dict())
                                         for f in report.soundness_violations],
                "converse_failures": [jsonable(f.as_dict()) for f in report.converse_failures]}
        Path(gallery).write_text(dumps(full) + "\n", encoding="utf-8")
    data = scan_data(report, gallery)
    sys.stdout.write(dumps(data) + "\n" if args.json else scan_text(data))
    return EXIT_OK if report.sound else EXIT_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"analyze": cmd_analyze, "corpus": cmd_corpus, "scan": cmd_scan}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())

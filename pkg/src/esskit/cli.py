"""Command-line interface.

Subcommands: ``check`` (parse, resolve, well-formedness), ``lint``, ``map``
(phase specifications to canonical practice text), ``enact`` (visitation
trace of a method), ``export`` (machine-readable tree or DOT containment
graph), and ``corpus`` (materialize the bundled corpus).

Exit codes: 0 success, 1 error diagnostics (or any diagnostics under
``--strict``), 2 usage error, 3 unreadable input or unwritable output.
Identical inputs and flags produce byte-identical standard output.
"""

from __future__ import annotations

import argparse
import sys
from enum import IntEnum
from pathlib import Path

from . import dsl, lint, progress, render, togaf, validator
from .diagnostics import Diagnostic, ParseError, ResolveError
from .model import PHASE_IDS, ModelDocument, dotted_id, merge


class ExitStatus(IntEnum):
    OK = 0
    DIAGNOSTICS = 1
    USAGE = 2
    IO = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--strict", action="store_true",
                        help="treat warnings as failures (exit 1)")
    common.add_argument("--max-depth", type=int, default=3, metavar="N",
                        help="maximum activity-space nesting depth (default 3)")

    parser = argparse.ArgumentParser(
        prog="esskit",
        description="Method-engineering toolkit for Essence kernels, "
                    "practices, and ADM phase mappings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", parents=[common],
                             help="parse, resolve, and well-formedness-check")
    p_check.add_argument("files", nargs="+")

    p_lint = sub.add_parser("lint", parents=[common],
                            help="run the lint rule catalog")
    p_lint.add_argument("files", nargs="+")
    p_lint.add_argument("--enable", action="append", default=None,
                        metavar="IDS", help="comma-separated rule ids to run")
    p_lint.add_argument("--disable", action="append", default=None,
                        metavar="IDS", help="comma-separated rule ids to skip")

    p_map = sub.add_parser("map", parents=[common],
                           help="map phase specifications to practices")
    p_map.add_argument("files", nargs="+")
    p_map.add_argument("--phase", choices=PHASE_IDS, default=None,
                       help="map only this phase id")

    p_enact = sub.add_parser("enact", parents=[common],
                             help="print a method's visitation trace")
    p_enact.add_argument("files", nargs="+")
    p_enact.add_argument("--method", required=True,
                         help="method name or id to enact")
    p_enact.add_argument("--steps", type=int, required=True, metavar="N",
                         help="number of visitation steps to print")
    p_enact.add_argument("--trace", action="store_true",
                         help="print completion records '(iteration, phase)' "
                              "instead of bare visitation labels")

    p_export = sub.add_parser("export", parents=[common],
                              help="machine-readable export")
    p_export.add_argument("files", nargs="+")
    p_export.add_argument("--format", choices=("tree", "dot"), default="tree")

    p_corpus = sub.add_parser("corpus", parents=[common],
                              help="materialize the bundled corpus")
    p_corpus.add_argument("dest", nargs="?", default="corpus",
                          help="destination directory (default ./corpus)")

    return parser


def _load_documents(paths) -> tuple[ModelDocument | None, list[Diagnostic]]:
    """Parse every file; returns (merged document or None, parse diagnostics).

    Unreadable files abort the process with exit status 3.
    """
    documents = []
    diagnostics: list[Diagnostic] = []
    for raw in paths:
        path = Path(raw)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as failure:
            print(f"cannot read {path}: {failure.strerror or failure}",
                  file=sys.stderr)
            raise SystemExit(int(ExitStatus.IO))
        try:
            documents.append(dsl.parse(text, str(path)))
        except ParseError as failure:
            diagnostics.extend(failure.diagnostics)
    if diagnostics:
        return None, diagnostics
    return merge(*documents), []


def _diagnostic_order(diagnostic: Diagnostic):
    span = diagnostic.span
    if span is None:
        return ("~", 0, 0, diagnostic.rule, diagnostic.path)
    return (span.file, span.start_line, span.start_col, diagnostic.rule,
            diagnostic.path)


def _print_diagnostics(diagnostics, *, sort: bool = True) -> None:
    ordered = sorted(diagnostics, key=_diagnostic_order) if sort else diagnostics
    for diagnostic in ordered:
        print(diagnostic.render_line())


def _summary(diagnostics) -> tuple[int, int]:
    errors = sum(1 for d in diagnostics if d.is_error)
    return errors, len(diagnostics) - errors


def _exit_for(diagnostics, strict: bool) -> int:
    errors, warnings = _summary(diagnostics)
    if errors or (strict and warnings):
        return int(ExitStatus.DIAGNOSTICS)
    return int(ExitStatus.OK)


def _resolve_or_fail(document: ModelDocument):
    """Resolved model, or None after printing the resolution errors."""
    try:
        return validator.resolve(document)
    except ResolveError as failure:
        _print_diagnostics(failure.diagnostics)
        return None


def _cmd_check(args) -> int:
    document, parse_diagnostics = _load_documents(args.files)
    config = validator.CheckConfig(max_nesting_depth=args.max_depth)
    if document is None:
        diagnostics = parse_diagnostics
    else:
        _, diagnostics = validator.check(document, config)
    _print_diagnostics(diagnostics)
    errors, warnings = _summary(diagnostics)
    print(f"{errors} errors, {warnings} warnings")
    return _exit_for(diagnostics, args.strict)


def _selected_rules(args) -> set[str]:
    def split(values):
        out = []
        for chunk in values or ():
            out.extend(part.strip() for part in chunk.split(",") if part.strip())
        return out

    enabled = set(split(args.enable)) if args.enable else set(lint.VALID_RULE_IDS)
    return enabled - set(split(args.disable))


def _cmd_lint(args) -> int:
    document, parse_diagnostics = _load_documents(args.files)
    if document is None:
        _print_diagnostics(parse_diagnostics)
        return int(ExitStatus.DIAGNOSTICS)
    model = _resolve_or_fail(document)
    if model is None:
        return int(ExitStatus.DIAGNOSTICS)
    try:
        diagnostics = lint.run_lints(model, _selected_rules(args))
    except lint.UnknownRuleError as failure:
        print(str(failure), file=sys.stderr)
        return int(ExitStatus.USAGE)
    _print_diagnostics(diagnostics, sort=False)
    print(f"{len(diagnostics)} lint warnings")
    return _exit_for(diagnostics, args.strict)


def _cmd_map(args) -> int:
    document, parse_diagnostics = _load_documents(args.files)
    if document is None:
        _print_diagnostics(parse_diagnostics)
        return int(ExitStatus.DIAGNOSTICS)
    model = _resolve_or_fail(document)
    if model is None:
        return int(ExitStatus.DIAGNOSTICS)
    phases = document.phases()
    if args.phase is not None:
        phases = tuple(p for p in phases if p.phase == args.phase)
        if not phases:
            print(f"no phase {args.phase!r} in the input", file=sys.stderr)
            return int(ExitStatus.DIAGNOSTICS)
    elif not phases:
        print("no phase specifications in the input", file=sys.stderr)
        return int(ExitStatus.DIAGNOSTICS)
    config = validator.CheckConfig(max_nesting_depth=args.max_depth)
    try:
        practices = [togaf.map_phase(phase, model, config) for phase in phases]
    except togaf.MappingError as failure:
        print(str(failure), file=sys.stderr)
        return int(ExitStatus.DIAGNOSTICS)
    sys.stdout.write(render.render_canonical(ModelDocument(practices)))
    return int(ExitStatus.OK)


def _cmd_enact(args) -> int:
    document, parse_diagnostics = _load_documents(args.files)
    if document is None:
        _print_diagnostics(parse_diagnostics)
        return int(ExitStatus.DIAGNOSTICS)
    model = _resolve_or_fail(document)
    if model is None:
        return int(ExitStatus.DIAGNOSTICS)
    method = None
    for candidate in document.methods():
        if candidate.name == args.method or \
                dotted_id("method", candidate.name) == args.method:
            method = candidate
            break
    if method is None:
        print(f"no method {args.method!r} in the input", file=sys.stderr)
        return int(ExitStatus.DIAGNOSTICS)
    labels = togaf.phase_labels(document)

    def label(practice_id: str) -> str:
        if practice_id in labels:
            return labels[practice_id]
        element = document.lookup(practice_id)
        return element.name if element is not None else practice_id

    try:
        if args.trace:
            state = progress.start_enactment(method)
            for _ in range(max(args.steps - 1, 0)):
                state = progress.next_phase(state)
            for iteration, practice_id in state.trace:
                print(f"{iteration} {label(practice_id)}")
        else:
            for practice_id in progress.visitation(method, args.steps):
                print(label(practice_id))
    except progress.EnactmentError as failure:
        print(str(failure), file=sys.stderr)
        return int(ExitStatus.DIAGNOSTICS)
    return int(ExitStatus.OK)


def _cmd_export(args) -> int:
    document, parse_diagnostics = _load_documents(args.files)
    if document is None:
        _print_diagnostics(parse_diagnostics)
        return int(ExitStatus.DIAGNOSTICS)
    if args.format == "dot":
        sys.stdout.write(render.export_dot(document))
        return int(ExitStatus.OK)
    model = _resolve_or_fail(document)
    if model is None:
        return int(ExitStatus.DIAGNOSTICS)
    config = validator.CheckConfig(max_nesting_depth=args.max_depth)
    diagnostics = validator.check_wellformedness(model, config)
    diagnostics += lint.run_lints(model)
    sys.stdout.write(render.export_json(document, diagnostics=diagnostics))
    return _exit_for(diagnostics, args.strict)


def _cmd_corpus(args) -> int:
    dest = Path(args.dest)
    try:
        dest.mkdir(parents=True, exist_ok=True)
        for name, text in sorted(togaf.corpus_files().items()):
            target = dest / name
            target.write_text(text, encoding="utf-8")
            print(str(target))
    except OSError as failure:
        print(f"cannot write {dest}: {failure.strerror or failure}",
              file=sys.stderr)
        return int(ExitStatus.IO)
    return int(ExitStatus.OK)


_COMMANDS = {
    "check": _cmd_check,
    "lint": _cmd_lint,
    "map": _cmd_map,
    "enact": _cmd_enact,
    "export": _cmd_export,
    "corpus": _cmd_corpus,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as leave:
        return int(leave.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except SystemExit as leave:
        return int(leave.code or 0)


def main() -> None:
    sys.exit(run())

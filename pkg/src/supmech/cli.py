"""``supmech`` command line: run verification suites from flags or a scenario file.

Scenario files are INI (one section per suite, ``[gns]`` or ``[gns:label]``) or
JSON (``{"gns": {...}}`` or ``{"suites": [{"suite": "gns", ...}]}``).
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .nc import ParseError, PresentationError
from .report import VerificationReport, emit_report
from .suites import SUITES, SchemaError, run_suite

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SchemaError(message)


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", type=Path, default=d(None), help="scenario file (INI or JSON)")
    p.add_argument("--out", type=Path, default=d(None), help="directory for report.json and grid CSVs")
    p.add_argument("--format", choices=("json", "text"), default=d("json"), help="stdout format")
    p.add_argument("--seed", type=int, default=d(None), help="seed for suites that draw random numbers (default 0)")
    p.add_argument("--jobs", type=int, default=d(1), help="run independent suites in parallel")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="supmech", description="Run verification suites and emit reports.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, suite in SUITES.items():
        sp = sub.add_parser(name, help=f"run the {name} suite")
        _global_flags(sp, suppress=True)
        for key in suite.schema:
            if key == "seed":
                continue
            sp.add_argument(_flag(key), dest=f"param_{key}", default=None, metavar=key.upper())
    return parser


# -- scenario files ------------------------------------------------------------------


def _suite_of(section: str) -> str:
    return section.split(":", 1)[0]


def load_scenario(path: Path) -> List[Tuple[str, str, Dict[str, Any]]]:
    """``[(label, suite, params)]`` in file order."""
    text = path.read_text()
    if not text.strip():
        raise SchemaError(f"{path}: empty scenario; expected one section per suite, e.g. [gns]")
    stripped = text.lstrip()
    out: List[Tuple[str, str, Dict[str, Any]]] = []
    if stripped.startswith("{") or path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
        if isinstance(data, dict) and "suites" in data:
            if set(data) != {"suites"} or not isinstance(data["suites"], list):
                raise SchemaError(f"{path}: top level must be {{\"suites\": [...]}}")
            for k, item in enumerate(data["suites"]):
                if not isinstance(item, dict) or "suite" not in item:
                    raise SchemaError(f"{path}: suites[{k}] needs a 'suite' key")
                params = {a: b for a, b in item.items() if a != "suite"}
                out.append((f"{item['suite']}:{k}", str(item["suite"]), params))
        elif isinstance(data, dict):
            for label, params in data.items():
                if not isinstance(params, dict):
                    raise SchemaError(f"{path}: section {label!r} must be an object")
                out.append((label, _suite_of(label), params))
        else:
            raise SchemaError(f"{path}: top level must be an object")
    else:
        cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
        cp.optionxform = str
        try:
            cp.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise SchemaError(f"{path}: {exc}") from exc
        for label in cp.sections():
            out.append((label, _suite_of(label), dict(cp[label])))
    if not out:
        raise SchemaError(f"{path}: no suites; expected one section per suite, e.g. [gns]")
    for label, suite, _ in out:
        if suite not in SUITES:
            raise SchemaError(f"{path}: section {label!r}: unknown suite {suite!r}; available {sorted(SUITES)}")
    return out


# -- running -------------------------------------------------------------------------


def _run_one(job: Tuple[str, str, Dict[str, Any], Optional[str], bool]) -> VerificationReport:
    label, suite, params, out, require_seed = job
    return run_suite(suite, params, Path(out) if out else None, require_seed=require_seed)


def merge_reports(labelled: List[Tuple[str, VerificationReport]]) -> VerificationReport:
    """Single report whose entry ids are prefixed by the scenario label."""
    merged = VerificationReport("scenario")
    merged.started = min(r.started for _, r in labelled)
    for label, r in labelled:
        for e in r.entries:
            e.id = f"{label}/{e.id}"
            merged.entries.append(e)
        merged.results[label] = {"suite": r.suite, "status": r.status, **r.results}
    return merged.finish()


def run(args: argparse.Namespace) -> Tuple[VerificationReport, int]:
    jobs: List[Tuple[str, str, Dict[str, Any]]] = []
    from_file = args.config is not None
    if from_file:
        scenario = load_scenario(args.config)
        if args.command:
            scenario = [s for s in scenario if s[1] == args.command] or [(args.command, args.command, {})]
        jobs = scenario
    elif args.command:
        jobs = [(args.command, args.command, {})]
    else:
        raise SchemaError("nothing to run: give a subcommand or --config")
    overrides = {k[6:]: v for k, v in vars(args).items() if k.startswith("param_") and v is not None}
    prepared = []
    multi = len(jobs) > 1
    for label, suite, params in jobs:
        params = {**params, **overrides}
        if args.seed is not None and "seed" in SUITES[suite].schema:
            params["seed"] = args.seed
        SUITES[suite].validate(params, require_seed=from_file)
        out = None
        if args.out is not None:
            target = args.out / label.replace(":", "_") if multi else args.out
            target.mkdir(parents=True, exist_ok=True)
            out = str(target)
        prepared.append((label, suite, params, out, from_file))
    if args.jobs > 1 and len(prepared) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, prepared))
    else:
        reports = [_run_one(j) for j in prepared]
    report = reports[0] if not multi else merge_reports([(j[0], r) for j, r in zip(prepared, reports)])
    return report, EXIT_OK if report.passed else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise SchemaError("--jobs must be at least 1")
        report, code = run(args)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "report.json").write_bytes(emit_report(report, "json"))
        sys.stdout.buffer.write(emit_report(report, args.format))
        sys.stdout.flush()
        if code:
            for e in report.failures():
                print(f"FAIL {e.id}: residual {e.residual} > tolerance {e.tolerance}  [{e.anchor}]", file=sys.stderr)
        return code
    except (SchemaError, PresentationError, ParseError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"supmech: config error: {msg}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"supmech: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line harness.

    klab <experiment> [--key value]... [--output path] [--format csv|json]
                      [--seed n] [--jobs n] [--config path]
    klab run --experiment <experiment> ...
    klab list

Values accept comma lists and inclusive integer ranges ("2..300"). Every
combination of the given values is one job. Exit status: 0 if every hard
check holds, 1 if one fails, 2 on a configuration error.
"""
from __future__ import annotations

import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import BadParameters, BudgetExceeded
from .experiments import (REGISTRY, REQUIRED, SECTIONS, ConfigError, Job, expand,
                          failing_hard_rows, run_job, verify_all_jobs)
from .reporting import to_csv, to_json

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}
_GLOBAL_KEYS = {"experiment", "output", "format", "seed", "jobs", "only"}


def parse_item(text: str, kind: type, key: str) -> list:
    """One comma-separated item: a scalar or an inclusive integer range a..b."""
    text = text.strip()
    if kind is int and ".." in text:
        lo, _, hi = text.partition("..")
        try:
            a, b = int(lo), int(hi)
        except ValueError:
            raise ConfigError(f"--{key}: malformed range {text!r}") from None
        if a > b:
            raise ConfigError(f"--{key}: empty range {text!r} (start exceeds end)")
        return list(range(a, b + 1))
    try:
        if kind is bool:
            low = text.lower()
            if low in _TRUE:
                return [True]
            if low in _FALSE:
                return [False]
            raise ValueError
        if kind is int:
            return [int(text)]
        if kind is float:
            return [float(text)]
    except ValueError:
        raise ConfigError(f"--{key}: cannot read {text!r} as {kind.__name__}") from None
    return [text]


def parse_values(text: str, kind: type, key: str) -> list:
    items = [t for t in text.split(",")]
    if any(not t.strip() for t in items):
        raise ConfigError(f"--{key}: empty item in {text!r}")
    return [v for t in items for v in parse_item(t, kind, key)]


def read_config(path: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and #-comments are skipped."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}, line {no}: expected key=value, got {line!r}")
        out[key.strip().lstrip("-")] = value.strip()
    return out


def split_pairs(tokens: list[str]) -> dict[str, str]:
    """Turn ``--key value`` / ``--key=value`` / bare ``--flag`` tokens into a dict."""
    out: dict[str, str] = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) == 2:
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        elif i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
            value = tokens[i + 1]
            i += 2
        else:
            value = "1"
            i += 1
        out[key] = value
    return out


def build_jobs(settings: dict[str, str]) -> tuple[list[Job], dict]:
    """Jobs and output options from merged config-file and command-line settings."""
    name = settings.get("experiment")
    if not name:
        raise ConfigError("no experiment given; run `klab list` to see them")
    try:
        seed = int(settings.get("seed", "0"))
        jobs = int(settings.get("jobs", os.environ.get("KLAB_JOBS", "1")))
    except ValueError as exc:
        raise ConfigError(f"--seed/--jobs must be integers ({exc})") from None
    if jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {jobs}")
    fmt = settings.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"--format must be csv or json, got {fmt!r}")
    opts = {"format": fmt, "output": settings.get("output"), "jobs": jobs}
    if name == "verify-all":
        extra = set(settings) - _GLOBAL_KEYS
        if extra:
            raise ConfigError(f"verify-all takes no parameter(s) {', '.join(sorted(extra))}")
        only = settings.get("only")
        return verify_all_jobs(seed, only.split(",") if only else None), opts
    exp = REGISTRY.get(name)
    if exp is None:
        raise ConfigError(f"unknown experiment {name!r}; run `klab list` to see them")
    values = {}
    for key, text in settings.items():
        if key in _GLOBAL_KEYS:
            continue
        if key not in exp.params:
            raise ConfigError(f"experiment {name!r} has no parameter --{key}")
        values[key] = parse_values(text, exp.params[key].kind, key)
    return expand(name, values, seed), opts


def execute(jobs: list[Job], workers: int) -> list[dict]:
    """Run jobs on a bounded process pool; rows come back in job order."""
    if workers == 1 or len(jobs) <= 1:
        return [row for job in jobs for row in run_job(job)]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        chunks = pool.map(run_job, jobs, chunksize=max(1, len(jobs) // (8 * workers)))
        return [row for chunk in chunks for row in chunk]


def _list() -> str:
    lines = []
    for name in sorted(REGISTRY):
        exp = REGISTRY[name]
        keys = " ".join(f"--{k} (required)" if p.default is REQUIRED else f"--{k}={p.default}"
                        for k, p in exp.params.items())
        lines.append(f"{name:16s} {exp.description}\n{'':16s} {keys}")
    lines.append(f"{'verify-all':16s} acceptance sweeps; --only {','.join(SECTIONS)}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in ("-h", "--help", "help"):
        print(__doc__.strip())
        return 0
    try:
        head = argv[0] if argv and not argv[0].startswith("--") else None
        if head == "list":
            print(_list())
            return 0
        cli = split_pairs(argv[1:] if head else argv)
        settings: dict[str, str] = {}
        if "config" in cli:
            settings.update(read_config(cli.pop("config")))
        settings.update(cli)
        if head and head != "run":
            settings["experiment"] = head
        jobs, opts = build_jobs(settings)
        rows = execute(jobs, opts["jobs"])
    except (ConfigError, BadParameters, BudgetExceeded, ValueError) as exc:
        print(f"klab: error: {exc}", file=sys.stderr)
        return 2
    text = to_json(rows) if opts["format"] == "json" else to_csv(rows)
    if opts["output"]:
        Path(opts["output"]).write_text(text)
    else:
        sys.stdout.write(text)
    failed = failing_hard_rows(rows)
    hard = sum(r["param_kind"] == "hard" for r in rows)
    print(f"klab: {len(rows)} rows, {hard} hard checks, {len(failed)} failed", file=sys.stderr)
    for r in failed[:20]:
        print(f"klab: FAILED {r['experiment']} {r['param_check']}: lhs={r['lhs']!r} rhs={r['rhs']!r}",
              file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end.

Reads a JSON config (file or stdin), runs one command and prints JSON-lines
records to stdout.  Exit codes: 0 success, 2 not found at the requested
resolution or budget, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dynamics import ElementStream, below_accumulation_census, extract_decreasing, find_accumulation_point
from .errors import BudgetExceeded, EgyptsumError, ParseError
from .groups import format_rational, get_group, parse_rational
from .lcf0 import set_from_config, validate_lcf0
from .sumset import (
    DEFAULT_BUDGET,
    SumSpec,
    build_net,
    enumerate_representations,
    find_gap,
    representation_census,
    trichotomy_check,
)

COMMANDS = ("reps", "census", "gap", "net", "accum", "decseq", "belowcensus", "validate")
EXIT_OK, EXIT_ERROR, EXIT_NOT_FOUND = 0, 1, 2


class RunConfig:
    """Parsed config plus command-line overrides."""

    def __init__(self, raw: dict, args: argparse.Namespace):
        if not isinstance(raw, dict):
            raise ParseError("config must be a JSON object")
        self.raw = raw
        self.group = get_group(raw.get("group", "rationals"))
        descriptors = raw.get("sets")
        if not descriptors:
            raise ParseError("config needs a nonempty 'sets' list")
        sets = [set_from_config(self.group, d) for d in descriptors]
        if "n" in raw:
            if len(sets) != 1:
                raise ParseError("'n' repeats a single set; give exactly one descriptor")
            sets = sets * self._int(raw["n"], "n")
        self.sets = sets
        self.budget = args.budget if args.budget is not None else self._int(raw.get("budget", DEFAULT_BUDGET), "budget")
        self.k_max = args.k_max if args.k_max is not None else self._int(raw.get("k_max", 10), "k_max")
        self.length = args.length if args.length is not None else raw.get("length")
        schedule = args.schedule if args.schedule is not None else raw.get("schedule")
        if isinstance(schedule, str):
            schedule = [s for s in schedule.split(",") if s.strip()]
        self.schedule = None if schedule is None else [self._int(k, "schedule") for k in schedule]

    @property
    def spec(self) -> SumSpec:
        return SumSpec(self.group, tuple(self.sets))

    @staticmethod
    def _int(value, what):
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise ParseError(f"{what} must be an integer")
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"{what} must be an integer, got {value!r}") from None

    def element(self, key):
        if key not in self.raw:
            raise ParseError(f"config needs {key!r}")
        value = self.raw[key]
        if not isinstance(value, str):
            raise ParseError(f"{key} must be a string literal, got {value!r}")
        return self.group.parse(value)

    def rational(self, key):
        if key not in self.raw or not isinstance(self.raw[key], str):
            raise ParseError(f"config needs {key!r} as a rational string")
        return parse_rational(self.raw[key])

    def interval(self, key="interval"):
        value = self.raw.get(key)
        if isinstance(value, list) and len(value) == 2:
            a, b = value
        elif isinstance(value, str):
            a, b = _split_interval(value)
        else:
            raise ParseError(f"config needs {key!r} as \"(a,b)\" or [a, b]")
        if not isinstance(a, str) or not isinstance(b, str):
            raise ParseError("interval endpoints must be string literals")
        return self.group.parse(a), self.group.parse(b)

    def require(self, value, what):
        if value is None:
            raise ParseError(f"config needs {what!r}")
        return value


def _split_interval(text: str):
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError(f"interval must look like (a,b): {text!r}")
    body = s[1:-1]
    depth = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i].strip(), body[i + 1 :].strip()
    raise ParseError(f"interval must have two endpoints: {text!r}")


# ---------------------------------------------------------------------------
# Commands; each returns (exit code, list of records)
# ---------------------------------------------------------------------------


def cmd_reps(cfg: RunConfig):
    G = cfg.group
    g = cfg.element("target")
    reps = enumerate_representations(cfg.spec, g, cfg.budget)
    records = [{"terms": [G.format(t) for t in r.terms], "target": G.format(g)} for r in reps]
    records.append({"count": len(reps)})
    return EXIT_OK, records


def cmd_census(cfg: RunConfig):
    G = cfg.group
    g = cfg.element("target")
    spec = cfg.spec
    report = representation_census(spec, g, cfg.require(cfg.schedule, "schedule"), cfg.budget)
    record = {"target": G.format(g), "schedule": list(report.schedule), "counts": list(report.counts)}
    if spec.n == 3:
        record["trichotomy"] = str(trichotomy_check(spec, g, report))
    return EXIT_OK, [record]


def _fmt_opt(G, x):
    return None if x is None else G.format(x)


def cmd_gap(cfg: RunConfig):
    G = cfg.group
    query = cfg.interval()
    cert = find_gap(cfg.spec, query, cfg.k_max, cfg.budget)
    q = [G.format(x) for x in query]
    if cert is None:
        return EXIT_NOT_FOUND, [{"status": "NOT_FOUND_AT_RESOLUTION", "query": q, "k_max": cfg.k_max}]
    return EXIT_OK, [
        {
            "gap": [G.format(x) for x in cert.gap],
            "component": [_fmt_opt(G, x) for x in cert.component],
            "query": q,
            "resolution": cert.k,
            "net_size": cert.net_size,
        }
    ]


def cmd_net(cfg: RunConfig):
    G = cfg.group
    k = RunConfig._int(cfg.raw.get("k", 1), "k")
    net = build_net(cfg.spec, k, cfg.budget)
    return EXIT_OK, [{"k": k, "fattening": format_rational(net.fattening), "points": [G.format(x) for x in net.points]}]


def _stream(cfg: RunConfig):
    return ElementStream.from_spec(cfg.spec, cfg.raw.get("stream", "by-denominator-sum"))


def cmd_accum(cfg: RunConfig):
    G = cfg.group
    samples = RunConfig._int(cfg.raw.get("samples", 64), "samples")
    depth = RunConfig._int(cfg.raw.get("depth", 20), "depth")
    point = find_accumulation_point(_stream(cfg), samples, depth)
    if point is None:
        return EXIT_NOT_FOUND, [{"status": "NONE_FOUND", "samples": samples}]
    return EXIT_OK, [{"accumulation_point": G.format(point), "samples": samples, "depth": depth}]


def cmd_decseq(cfg: RunConfig):
    G = cfg.group
    stream = _stream(cfg)
    length = RunConfig._int(cfg.require(cfg.length, "length"), "length")
    if "g" in cfg.raw:
        g = cfg.element("g")
    else:
        g = find_accumulation_point(
            stream,
            RunConfig._int(cfg.raw.get("samples", 64), "samples"),
            RunConfig._int(cfg.raw.get("depth", 20), "depth"),
        )
        if g is None:
            return EXIT_NOT_FOUND, [{"status": "NONE_FOUND"}]
    scan = RunConfig._int(cfg.raw.get("scan_budget", 10**5), "scan_budget")
    trace = extract_decreasing(stream, g, length, scan)
    record = {"g": G.format(g), "terms": [G.format(x) for x in trace.terms], "length": len(trace.terms)}
    if trace.exhausted:
        record["status"] = "BUDGET_EXHAUSTED"
        return EXIT_NOT_FOUND, [record]
    return EXIT_OK, [record]


def cmd_belowcensus(cfg: RunConfig):
    G = cfg.group
    g = cfg.element("g")
    eta = cfg.rational("eta")
    side = cfg.raw.get("side", "below")
    schedule = cfg.require(cfg.schedule, "schedule")
    counts = below_accumulation_census(cfg.spec, g, eta, schedule, side, cfg.budget)
    return EXIT_OK, [{"g": G.format(g), "eta": format_rational(eta), "side": side, "schedule": schedule, "counts": list(counts)}]


def cmd_validate(cfg: RunConfig):
    depth = RunConfig._int(cfg.raw.get("depth", 16), "depth")
    records = []
    status = EXIT_OK
    for T in cfg.sets:
        rep = validate_lcf0(T, depth)
        rec = {"set": T.name, "status": rep.status, "depth": depth}
        if not rep.passed:
            rec["violation"] = rep.violation
            rec["level"] = rep.level
            rec["witness"] = None if rep.witness is None else T.group.format(rep.witness)
            status = EXIT_ERROR
        records.append(rec)
    return status, records


DISPATCH = {
    "reps": cmd_reps,
    "census": cmd_census,
    "gap": cmd_gap,
    "net": cmd_net,
    "accum": cmd_accum,
    "decseq": cmd_decseq,
    "belowcensus": cmd_belowcensus,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="egyptsum", description="Exact generalized Egyptian fraction sumsets.")
    p.add_argument("--config", default="-", help="JSON config path, or - for stdin (default)")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--budget", type=int)
    p.add_argument("--k-max", type=int, dest="k_max")
    p.add_argument("--schedule", help="comma-separated resolutions, e.g. 4,6,8")
    p.add_argument("--length", type=int)
    return p


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.config == "-":
            raw = json.load(stdin)
        else:
            with open(args.config) as fh:
                raw = json.load(fh)
        code, records = DISPATCH[args.command](RunConfig(raw, args))
    except BudgetExceeded as e:
        print(f"egyptsum: budget exceeded: {e}", file=stderr)
        return EXIT_ERROR
    except (EgyptsumError, ValueError, OSError) as e:
        # json.JSONDecodeError is a ValueError
        print(f"egyptsum: {e}", file=stderr)
        return EXIT_ERROR
    # assembled first so a failure never leaves partial output
    stdout.write("".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records))
    return code


if __name__ == "__main__":
    sys.exit(main())

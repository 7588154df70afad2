"""Command-line entry point.

Reports are single JSON objects, record streams are JSONL.  Exit codes:
0 success, 1 verification mismatch (diagnostics as JSON on stderr),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

from . import __version__
from .chartable import build_chartable
from .checks import SUITES, run_suites
from .design import DesignError, build_design, export_incidence, verify_2design
from .diffsets import (
    DEFAULT_BUDGET, BudgetExceeded, EpsFn, all_eps, build_D, enumerate_valid, filter_theorem,
    is_shds_character, is_shds_convolution,
)
from .equivalence import classify
from .gf import FieldError, make_field
from .orbits import build_orbit_table

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

ENV_PREFIX = "SHDS_"


SCHEMAS = {
    "field-info": "field-info", "orbits": "orbits", "chartable": "chartable",
    "enumerate": "enumerate-record", "verify": "verify", "classify": "classify",
    "design": "design", "error": "error",
}


def load_schema(command: str) -> dict:
    """The shipped JSON schema for a subcommand's output (per record for enumerate)."""
    name = SCHEMAS[command]
    text = resources.files("shds").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


class UsageError(Exception):
    pass


class Mismatch(Exception):
    def __init__(self, diagnostics: dict):
        super().__init__(diagnostics.get("reason", "verification mismatch"))
        self.diagnostics = diagnostics


def _env_int(name: str) -> Optional[int]:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from None


def _resolve(flag, name: str, default):
    """Explicit flag, then SHDS_<name>, then the default."""
    if flag is not None:
        return flag
    env = _env_int(name)
    return default if env is None else env


@dataclass(frozen=True)
class RunConfig:
    p: int
    n: int
    command: str
    out: Optional[str] = None
    fmt: str = "json"
    verify: str = "both"
    sample: Optional[int] = None
    seed: Optional[int] = None
    threads: int = 1
    budget: int = DEFAULT_BUDGET
    limit: Optional[int] = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        threads = _resolve(ns.threads, "THREADS", 1)
        budget = _resolve(ns.budget, "BUDGET", DEFAULT_BUDGET)
        seed = _resolve(getattr(ns, "seed", None), "SEED", None)
        if threads < 1:
            raise UsageError("--threads must be at least 1")
        if budget < 1:
            raise UsageError("--budget must be positive")
        sample = getattr(ns, "sample", None)
        if sample is not None and seed is None:
            raise UsageError("--sample requires --seed (or SHDS_SEED)")
        return cls(
            p=ns.p, n=ns.n, command=ns.command, out=getattr(ns, "out", None),
            fmt=getattr(ns, "format", None) or "json", verify=getattr(ns, "verify", "both"),
            sample=sample, seed=seed, threads=threads, budget=budget,
            limit=getattr(ns, "limit", None),
        )


# -- output helpers -------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _emit(cfg: RunConfig, text: str, stdout) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _emit_lines(cfg: RunConfig, lines: Iterable[str], stdout) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(lines)
    else:
        stdout.writelines(lines)


# -- subcommands ----------------------------------------------------------

def cmd_field_info(cfg: RunConfig, stdout) -> None:
    _emit(cfg, _dump(make_field(cfg.p, cfg.n).info()), stdout)


def cmd_orbits(cfg: RunConfig, stdout) -> None:
    _emit(cfg, _dump(build_orbit_table(make_field(cfg.p, cfg.n)).summary()), stdout)


def cmd_chartable(cfg: RunConfig, stdout) -> None:
    ct = build_chartable(make_field(cfg.p, cfg.n))
    _emit(cfg, ct.to_csv() if cfg.fmt == "csv" else _dump(ct.to_json()), stdout)


def _record(ctx, table, eps: EpsFn, verify: str) -> dict:
    valid = filter_theorem(eps, ctx)
    rec = {"p": ctx.p, "n": ctx.n, "eps": eps.to_json(), "bits": eps.bits, "mu": eps.mu,
           "valid": valid}
    if verify != "none":
        D = build_D(table, eps)
        if verify in ("convolution", "both"):
            rec["convolution"] = is_shds_convolution(D)
        if verify in ("character", "both"):
            rec["character"] = is_shds_character(D)
    return rec


def _disagrees(rec: dict) -> bool:
    return any(rec[k] != rec["valid"] for k in ("convolution", "character") if k in rec)


def cmd_enumerate(cfg: RunConfig, stdout, *, scan_all: bool = False) -> None:
    ctx = make_field(cfg.p, cfg.n)
    table = build_orbit_table(ctx)
    if scan_all:
        if 2 ** (ctx.q + 2) > cfg.budget:
            raise UsageError(f"2^{ctx.q + 2} sign functions exceed the budget {cfg.budget}")
        cands: list[EpsFn] = list(all_eps(ctx.q))
    elif cfg.sample is not None:
        cands = enumerate_valid(ctx, "sample", count=cfg.sample, seed=cfg.seed)
    else:
        stream = enumerate_valid(ctx, "stream")
        cands = []
        for eps in stream:
            if cfg.limit is not None and len(cands) >= cfg.limit:
                break
            cands.append(eps)
            if len(cands) > cfg.budget:
                raise BudgetExceeded(f"more than {cfg.budget} valid eps functions")
    if cfg.limit is not None:
        cands = cands[:cfg.limit]

    def work(eps):
        return _record(ctx, table, eps, cfg.verify)

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            records = list(pool.map(work, cands))
    else:
        records = [work(e) for e in cands]
    _emit_lines(cfg, (json.dumps(r) + "\n" for r in records), stdout)
    bad = [r["bits"] for r in records if _disagrees(r)]
    if bad:
        raise Mismatch({"command": "enumerate", "reason": "oracle disagreement",
                        "eps": bad[:20], "count": len(bad)})


def cmd_verify(cfg: RunConfig, stdout, suites: Optional[list[str]]) -> None:
    ctx = make_field(cfg.p, cfg.n)
    limit = cfg.limit if cfg.limit is not None else 10
    seed = cfg.seed if cfg.seed is not None else 0
    results = run_suites(ctx, suites, limit=limit, seed=seed)
    ok = all(r.status != "fail" for r in results)
    report = {"p": ctx.p, "n": ctx.n, "q": ctx.q, "seed": seed, "limit": limit, "ok": ok,
              "suites": [r.to_json() for r in results]}
    _emit(cfg, _dump(report), stdout)
    if not ok:
        raise Mismatch({"command": "verify", "reason": "property suite failed",
                        "failed": [r.name for r in results if r.status == "fail"]})


def cmd_classify(cfg: RunConfig, stdout) -> None:
    ctx = make_field(cfg.p, cfg.n)
    res = classify(ctx, budget=cfg.budget, threads=cfg.threads)
    report = res.to_json()
    _emit(cfg, _dump(report), stdout)
    b = report["bounds"]
    failed = [k for k in ("exponential_bound_holds", "counting_bound_holds",
                          "sizes_divide_action_order", "sizes_sum_to_total") if not b[k]]
    if failed:
        raise Mismatch({"command": "classify", "reason": "bound check failed", "failed": failed})


def cmd_design(cfg: RunConfig, stdout, bits: str, export: Optional[str]) -> None:
    ctx = make_field(cfg.p, cfg.n)
    if len(bits) != ctx.q + 2 or set(bits) - {"0", "1"}:
        raise UsageError(f"--eps must be a 0/1 string of length {ctx.q + 2}")
    if export and not cfg.out:
        raise UsageError("--export requires --out")
    eps = EpsFn.from_bits(bits)
    D = build_D(build_orbit_table(ctx), eps)
    report = {"p": ctx.p, "n": ctx.n, "eps": bits, "valid": filter_theorem(eps, ctx)}
    try:
        design = build_design(D)
    except DesignError as exc:
        report["design"] = {"ok": False, "v": ctx.q**3, "k": D.size, "lambda": None,
                            "witness": None, "reason": str(exc)}
        stdout.write(_dump(report))
        raise Mismatch({"command": "design", "reason": str(exc), "eps": bits}) from None
    check = verify_2design(design)
    report["design"] = check.to_json()
    if export and check.ok:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            report["lines_written"] = export_incidence(design, export, fh)
        report["export"] = export
    stdout.write(_dump(report))
    if not check.ok:
        raise Mismatch({"command": "design", "reason": check.reason, "eps": bits,
                        "witness": report["design"]["witness"]})


# -- argument parsing -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="characteristic, p = 3 mod 4")
    common.add_argument("--n", type=int, default=1, help="odd extension degree (default 1)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (env SHDS_THREADS, default 1)")
    common.add_argument("--budget", type=int, default=None,
                        help=f"enumeration budget (env SHDS_BUDGET, default {DEFAULT_BUDGET})")

    parser = argparse.ArgumentParser(prog="shds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("field-info", parents=[common], help="field parameters as JSON")
    sp.add_argument("--out")
    sp = sub.add_parser("orbits", parents=[common], help="orbit sizes and representatives")
    sp.add_argument("--out")
    sp = sub.add_parser("chartable", parents=[common], help="principal character table")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")

    sp = sub.add_parser("enumerate", parents=[common], help="valid eps functions as JSONL")
    sp.add_argument("--limit", type=int)
    sp.add_argument("--verify", choices=("convolution", "character", "both", "none"),
                    default="both")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--sample", type=int, help="draw this many seeded random valid eps")
    mode.add_argument("--all", action="store_true",
                      help="scan all 2^(q+2) sign functions, valid or not")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--format", choices=("jsonl",), default="jsonl")
    sp.add_argument("--out")

    sp = sub.add_parser("verify", parents=[common], help="run the exact property suites")
    sp.add_argument("--suite", action="append", choices=sorted(SUITES),
                    help="restrict to this suite (repeatable)")
    sp.add_argument("--limit", type=int, help="sample size for sampled suites (default 10)")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")

    sp = sub.add_parser("classify", parents=[common], help="equivalence classes under FKEU")
    sp.add_argument("--out")

    sp = sub.add_parser("design", parents=[common], help="translation design of D_eps")
    sp.add_argument("--eps", required=True, help="bitstring over I, 1 for +1 and 0 for -1")
    sp.add_argument("--export", choices=("dense01", "sparse"))
    sp.add_argument("--out", help="incidence output file (with --export)")
    return parser


def _fail(stderr, code: int, payload: dict) -> int:
    stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def run(argv: Optional[list[str]] = None, *, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig.from_args(ns)
        make_field(cfg.p, cfg.n)
        if ns.command == "field-info":
            cmd_field_info(cfg, stdout)
        elif ns.command == "orbits":
            cmd_orbits(cfg, stdout)
        elif ns.command == "chartable":
            cmd_chartable(cfg, stdout)
        elif ns.command == "enumerate":
            cmd_enumerate(cfg, stdout, scan_all=ns.all)
        elif ns.command == "verify":
            cmd_verify(cfg, stdout, ns.suite)
        elif ns.command == "classify":
            cmd_classify(cfg, stdout)
        elif ns.command == "design":
            cmd_design(cfg, stdout, ns.eps, ns.export)
    except FieldError as exc:
        return _fail(stderr, EXIT_USAGE, {"error": exc.code, "message": str(exc)})
    except (UsageError, BudgetExceeded) as exc:
        return _fail(stderr, EXIT_USAGE, {"error": "usage", "message": str(exc)})
    except Mismatch as exc:
        return _fail(stderr, EXIT_MISMATCH, {"error": "mismatch", **exc.diagnostics})
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 audit failure, 4 unsupported oracle
precondition.  Errors are written to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from . import cayley, coding, markov, reduction
from .partition import HorizonExceeded, OrderInconsistent, Unrecognized, audit_order, build_partition
from .presentation import GeometricPresentation, PresentationError, load_presentation

EXIT_OK, EXIT_INVALID, EXIT_AUDIT, EXIT_UNSUPPORTED = 0, 2, 3, 4


class AuditFailure(Exception):
    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass
class RunConfig:
    subcommand: str
    input: str
    tol: float = 1e-12
    radius: int = 7
    depth: int = 30
    format: str = "json"
    max_iters: int = 10**6
    horizon: Optional[int] = None
    cap_elements: int = 10**7
    log_base: str = "e"

    def check(self) -> None:
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.radius < 0 or self.depth < 1:
            raise ValueError("--radius must be >= 0 and --depth >= 1")
        if self.max_iters < 1 or self.cap_elements < 1 or (self.horizon is not None and self.horizon < 1):
            raise ValueError("caps must be positive")


def num(x: Any) -> Any:
    """15 significant digits for floats, recursively."""
    if isinstance(x, float):
        if math.isfinite(x):
            return float(f"{x:.15g}")
        return str(x)
    if isinstance(x, dict):
        return {k: num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [num(v) for v in x]
    return x


def dump_json(obj: Any) -> str:
    return json.dumps(num(obj), indent=1) + "\n"


def dump_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (f"{v:.15g}" if isinstance(v, float) else v) for v in r])
    return buf.getvalue()


# pipelines ---------------------------------------------------------------------


def _load(cfg: RunConfig) -> GeometricPresentation:
    with open(cfg.input, encoding="utf-8") as fh:
        return load_presentation(fh.read())


def _partition(cfg: RunConfig, G: GeometricPresentation, allow_length_two: bool = False):
    part = build_partition(G, cfg.horizon, allow_length_two=allow_length_two)
    bad = audit_order(part)
    if bad:
        raise AuditFailure("subdivision order audit failed", bad)
    return part


def _matrix(cfg: RunConfig, part) -> markov.MarkovMatrix:
    M = markov.transition_matrix(part)
    bad = markov.markov_audit(part, M)
    if bad:
        raise AuditFailure("Markov audit failed", bad)
    return M


def _entropy(cfg: RunConfig, G: GeometricPresentation, allow_length_two: bool = False) -> markov.EntropyReport:
    M = _matrix(cfg, _partition(cfg, G, allow_length_two))
    return markov.spectral_radius(M, cfg.tol, cfg.max_iters)


def cmd_validate(cfg: RunConfig) -> str:
    G = _load(cfg)
    sc = cayley.check_small_cancellation(G)
    return dump_json(
        {
            "geometric": True,
            "n": G.n,
            "generators": list(G.names),
            "relations": [G.word_str(w) for w in G.relations],
            "cyclic_order": [G.letter_name(x) for x in G.order],
            "orientable": G.orientable,
            "flags": list(G.flags),
            "small_cancellation": {"max_piece": sc.max_piece, "min_length": sc.min_length, "c_1_6": sc.verdict},
        }
    )


def cmd_partition(cfg: RunConfig) -> str:
    part = _partition(cfg, _load(cfg))
    if cfg.format == "csv":
        G = part.G
        rows = [
            (i, p.name, G.letter_name(p.owner), p.kind, ".".join(G.letter_name(x) for x in p.writing.prefix), G.corner_name(p.writing.corner))
            for i, p in enumerate(part.points)
        ]
        return dump_csv(["index", "name", "owner", "kind", "prefix", "fan"], rows)
    return part.to_json() + "\n"


def cmd_matrix(cfg: RunConfig) -> str:
    part = _partition(cfg, _load(cfg))
    M = _matrix(cfg, part)
    if cfg.format == "csv":
        A = M.dense()
        return dump_csv([""] + M.labels, [[M.labels[i]] + [int(v) for v in A[i]] for i in range(M.size)])
    return dump_json(
        {
            "size": M.size,
            "labels": M.labels,
            "rows": M.rows,
            "row_sums": M.row_sums(),
            "column_sums": M.column_sums(),
        }
    )


def cmd_entropy(cfg: RunConfig) -> str:
    G = _load(cfg)
    part = _partition(cfg, G)
    M = _matrix(cfg, part)
    rep = markov.spectral_radius(M, cfg.tol, cfg.max_iters)
    d = rep.to_dict()
    d["subintervals"] = M.size
    if cfg.log_base != "e":
        d[f"h_top_log{cfg.log_base}"] = math.log(rep.lam, int(cfg.log_base))
    d["bounds"] = [math.log(2 * G.n - 3), math.log(2 * G.n - 1)]
    return dump_json(d)


def _growth(cfg: RunConfig, G: GeometricPresentation, R: int) -> cayley.GrowthSeries:
    return cayley.ball_sizes(G, R, cfg.cap_elements)


def cmd_growth(cfg: RunConfig) -> str:
    g = _growth(cfg, _load(cfg), cfg.radius)
    rows = g.csv_rows()
    if cfg.format == "json":
        return dump_json([{"m": m, "sigma": s, "ratio": r if r != "" else None, "ln_ratio": l if l != "" else None} for m, s, r, l in rows])
    return dump_csv(["m", "sigma_m", "ratio", "ln_ratio"], [[v if v != "" else None for v in r] for r in rows])


def cmd_coding(cfg: RunConfig) -> str:
    G = _load(cfg)
    part = _partition(cfg, G)
    M = _matrix(cfg, part)
    I = coding.i_prefix_counts(M, cfg.depth)
    X = coding.x_prefix_counts(M, cfg.depth)
    sigma: list[Optional[int]] = [None] * cfg.depth
    if cayley.check_small_cancellation(G).verdict:
        g = _growth(cfg, G, min(cfg.radius, cfg.depth))
        for m, s in enumerate(g.sigma[1:], start=1):
            sigma[m - 1] = s
    rows = [
        (m, I[m - 1], X[m - 1], sigma[m - 1], math.log(I[m - 1]) / m, math.log(X[m - 1]) / m,
         None if sigma[m - 1] is None else math.log(sigma[m - 1]) / m)
        for m in range(1, cfg.depth + 1)
    ]
    header = ["m", "I_m", "X_m", "sigma_m", "ln_I_over_m", "ln_X_over_m", "ln_sigma_over_m"]
    if cfg.format == "json":
        return dump_json([dict(zip(header, r)) for r in rows])
    return dump_csv(header, rows)


def cmd_compare(cfg: RunConfig) -> str:
    G = _load(cfg)
    rep = _entropy(cfg, G)
    g = _growth(cfg, G, cfg.radius)
    rows = []
    for m, s, r, l in g.csv_rows()[1:]:
        rows.append((m, s, r, l, rep.h_top, abs(l - rep.h_top)))
    header = ["m", "sigma_m", "ratio", "ln_ratio", "h_top", "gap"]
    if cfg.format == "json":
        return dump_json({"lambda": rep.lam, "h_top": rep.h_top, "table": [dict(zip(header, r)) for r in rows]})
    return dump_csv(header, rows)


def cmd_reduce(cfg: RunConfig) -> str:
    G = _load(cfg)
    chain = reduction.reduce(G, entropy=lambda P: _entropy(cfg, P, allow_length_two=True).h_top)
    return chain.to_json() + "\n"


COMMANDS: dict[str, Callable[[RunConfig], str]] = {
    "validate": cmd_validate,
    "partition": cmd_partition,
    "matrix": cmd_matrix,
    "entropy": cmd_entropy,
    "growth": cmd_growth,
    "coding": cmd_coding,
    "compare": cmd_compare,
    "reduce": cmd_reduce,
}


def _error(code: int, exc: BaseException, **extra: Any) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit": code, **extra}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def run(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        cfg.check()
        text = COMMANDS[cfg.subcommand](cfg)
    except (PresentationError, FileNotFoundError, ValueError) as exc:
        return _error(EXIT_INVALID, exc)
    except AuditFailure as exc:
        return _error(EXIT_AUDIT, exc, violations=exc.violations)
    except (OrderInconsistent, Unrecognized, HorizonExceeded, markov.NonContiguous, markov.Degenerate,
            markov.NoConvergence, cayley.ClassOverflow) as exc:
        return _error(EXIT_AUDIT, exc)
    except (cayley.Unsupported, cayley.CapExceeded, coding.StateBlowup) as exc:
        return _error(EXIT_UNSUPPORTED, exc)
    out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="surface-markov", description="Circle Markov maps of surface group presentations.")
    p.add_argument("subcommand", choices=sorted(COMMANDS))
    p.add_argument("input", help="presentation file")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--radius", type=int, default=7, help="growth radius R")
    p.add_argument("--depth", type=int, default=30, help="coding depth m")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--max-iters", type=int, default=10**6)
    p.add_argument("--horizon", type=int, default=None, help="comparison horizon in letters")
    p.add_argument("--cap-elements", type=int, default=10**7)
    base = p.add_mutually_exclusive_group()
    base.add_argument("--log2", dest="log_base", action="store_const", const="2", default="e", help="also report entropy in bits")
    base.add_argument("--log10", dest="log_base", action="store_const", const="10", help="also report entropy in base 10")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("SE_THREADS")
    if threads is not None and not threads.strip().isdigit():
        return _error(EXIT_INVALID, ValueError(f"SE_THREADS must be a positive integer, got {threads!r}"))
    fmt = args.format or ("csv" if args.subcommand in ("growth", "coding") else "json")
    cfg = RunConfig(args.subcommand, args.input, args.tol, args.radius, args.depth, fmt, args.max_iters, args.horizon, args.cap_elements, args.log_base)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

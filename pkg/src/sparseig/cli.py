"""Batch command-line interface.

Subcommands: ``path``, ``certify``, ``bound``, ``subset``, ``rip``,
``oracle``.  Input is a headerless dense numeric matrix file (comma or
whitespace delimited); ``--mode gram`` reads a symmetric PSD matrix,
``--mode data`` reads a rectangular data matrix used directly as the
factor (columns of the file are variables).  For ``subset`` and the
subset oracle the response vector is the last column of the file.

All user-facing indices are 1-based.  Reports are JSON by default with
numbers at 17 significant digits so repeated runs are bit-comparable;
``--format csv`` emits plot-ready curves for ``path``, ``certify`` and
``bound``.  Exit codes: 0 success, 2 input error, 3 enumeration budget
exceeded.  The ``SPARSE_EIG_LOG`` environment variable
(error/warn/info/debug) controls diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .apps import SubsetProblem, greedy_subset, ls_error, rip_bounds, subset_certify
from .certify import (
    DEFAULT_CERT_TOL,
    DISPLAY_CERT_TOL,
    Certificate,
    STATUS_EMPTY_INTERVAL,
    build_bound_pool,
    card_bound,
    certify_path,
    minimize_gap,
)
from .errors import (
    BudgetExceeded,
    EmptyPattern,
    NotPositiveSemidefinite,
    NotSquare,
    ParseError,
    SparseEigError,
)
from .linalg import DEFAULT_EIG_TOL, DEFAULT_SQRT_TOL, FactorMatrix, SymMatrix, as_factor
from .oracle import OracleBudget, exact_delta, exact_phi, exact_sparse_eigmax, exact_subset
from .path import Path, path_greedy_approx, path_greedy_full, path_sort, path_threshold

__all__ = ["RunConfig", "ingest", "run", "main"]

log = logging.getLogger("sparseig.cli")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

_PATH_METHODS = {
    "sort": path_sort,
    "threshold": path_threshold,
    "greedy-full": path_greedy_full,
    "greedy-approx": path_greedy_approx,
}


@dataclass(frozen=True)
class RunConfig:
    """Echoable description of one batch run."""

    command: str
    input_path: str
    mode: str = "gram"
    center: bool = True
    method: str = "all"
    k: int | None = None
    S: int | None = None
    pattern: tuple[int, ...] | None = None  # 0-based internally
    rho: float | None = None
    rho_grid: int = 50
    cert_tol: float = DEFAULT_CERT_TOL
    eig_tol: float = DEFAULT_EIG_TOL
    epsilon: float = 1e-8
    lookahead: int = 1
    jobs: int = 1
    seed: int | None = None
    budget: int = 2_000_000
    out: str | None = None
    fmt: str = "json"
    task: str | None = None


def ingest(path: str, mode: str, center: bool = True):
    """Parse a matrix file.

    gram mode returns a SymMatrix (symmetrized, PSD-validated); data
    mode returns a float array, column-centered when ``center`` is set.

    Raises
    ------
    ParseError
        Malformed numeric fields or ragged rows (1-based positions).
    NotSquare, NotPositiveSemidefinite
        Gram-mode shape and spectrum validation.
    """
    if mode not in ("gram", "data"):
        raise ValueError(f"unknown input mode {mode!r}")
    with open(path, "r", encoding="utf-8") as handle:
        raw_lines = handle.readlines()
    rows: list[list[float]] = []
    width = None
    for lineno, raw in enumerate(raw_lines, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        fields = stripped.replace(",", " ").split() if "," in stripped else stripped.split()
        values = []
        for colno, token in enumerate(fields, start=1):
            try:
                values.append(float(token))
            except ValueError as exc:
                raise ParseError(f"cannot parse {token!r} as a number", lineno, colno) from exc
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(
                f"row has {len(values)} fields, expected {width}", lineno, min(len(values), width) + 1
            )
        rows.append(values)
    if not rows:
        raise ParseError("file contains no numeric rows", 1, 1)
    matrix = np.array(rows, dtype=float)
    if mode == "gram":
        if matrix.shape[0] != matrix.shape[1]:
            raise NotSquare(f"gram-mode input must be square, got {matrix.shape[0]}x{matrix.shape[1]}")
        sym = SymMatrix(matrix)
        w = np.linalg.eigvalsh(sym.values)
        slack = 1e-10 * float(np.linalg.norm(sym.values, "fro"))
        if w[0] < -slack:
            raise NotPositiveSemidefinite(
                f"smallest eigenvalue {w[0]:.6e} is below the allowed slack {-slack:.6e}"
            )
        return sym
    if center:
        matrix = matrix - matrix.mean(axis=0, keepdims=True)
    return matrix


def _fmt_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def _to_jsonable(obj):
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _dump_json(obj, indent: int = 0) -> str:
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            return _fmt_float(obj)
        return f'"{_fmt_float(obj)}"'
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {_dump_json(str(k))}: {_dump_json(v, indent + 2)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{pad}  {_dump_json(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _one_based(indices) -> list[int]:
    return [int(i) + 1 for i in indices]


def _path_point_dict(pt) -> dict:
    return {
        "k": pt.k,
        "indices": _one_based(pt.indices),
        "variance": pt.variance,
        "score": pt.gain,
    }


def _certificate_dict(cert: Certificate) -> dict:
    rel = cert.relative_gap
    return {
        "k": len(cert.pattern),
        "pattern": _one_based(cert.pattern),
        "rho_min": cert.rho_min,
        "rho_max": cert.rho_max,
        "rho_star": cert.rho_star,
        "gap": cert.gap_value,
        "primal_value": cert.primal_value,
        "phi_upper": cert.phi_upper,
        "variance": cert.variance,
        "relative_gap": rel,
        "status": cert.status,
        "certified": cert.certified,
        "certified_at_display_tol": bool(rel is not None and rel <= DISPLAY_CERT_TOL),
    }


def _build_factor(config: RunConfig):
    ingested = ingest(config.input_path, config.mode, center=config.center)
    if config.mode == "gram":
        return ingested, as_factor(ingested)
    return ingested, FactorMatrix(ingested)


def _cmd_path(config: RunConfig):
    source, factor = _build_factor(config)
    target = source if config.mode == "gram" else factor
    names = list(_PATH_METHODS) if config.method == "all" else [config.method]
    results = []
    for name in names:
        fn = _PATH_METHODS[name]
        kwargs = {"k_max": config.k, "eig_tol": config.eig_tol}
        if name == "greedy-approx":
            kwargs["lookahead"] = config.lookahead
        p = fn(target, **kwargs)
        results.append({"method": name, "points": [_path_point_dict(pt) for pt in p.points]})
    return {"paths": results}


def _certify_curve(config: RunConfig, factor) -> dict:
    p = path_greedy_approx(factor, lookahead=config.lookahead, k_max=config.k, eig_tol=config.eig_tol)
    certs = certify_path(
        factor, p, jobs=config.jobs, cert_tol=config.cert_tol, eig_tol=config.eig_tol,
        shrink_tol=config.epsilon,
    )
    pool = build_bound_pool(
        factor, path=p, certificates=certs, grid_size=config.rho_grid,
        jobs=config.jobs, eig_tol=config.eig_tol,
    )
    curve = []
    for pt, cert in zip(p.points, certs):
        curve.append(
            {
                "k": pt.k,
                "variance": cert.variance,
                "upper_bound": card_bound(pool, pt.k),
                "gap": cert.gap_value if cert.gap_value is not None else float("nan"),
                "certified": cert.certified,
            }
        )
    return {
        "certificates": [_certificate_dict(c) for c in certs],
        "curve": curve,
    }


def _cmd_certify(config: RunConfig):
    _, factor = _build_factor(config)
    if config.pattern is not None:
        cert = minimize_gap(
            factor, config.pattern, cert_tol=config.cert_tol, eig_tol=config.eig_tol,
            shrink_tol=config.epsilon,
        )
        return {"certificates": [_certificate_dict(cert)], "curve": _single_curve(cert)}
    if config.k is not None:
        p = path_greedy_approx(factor, lookahead=config.lookahead, k_max=config.k, eig_tol=config.eig_tol)
        cert = minimize_gap(
            factor, p.pattern(config.k), cert_tol=config.cert_tol, eig_tol=config.eig_tol,
            shrink_tol=config.epsilon,
        )
        return {"certificates": [_certificate_dict(cert)], "curve": _single_curve(cert)}
    return _certify_curve(config, factor)


def _single_curve(cert: Certificate) -> list[dict]:
    k = len(cert.pattern)
    if cert.status == STATUS_EMPTY_INTERVAL:
        upper = float("nan")
        gap_value = float("nan")
    else:
        upper = cert.phi_upper + cert.rho_star * k
        gap_value = cert.gap_value
    return [
        {
            "k": k,
            "variance": cert.variance,
            "upper_bound": upper,
            "gap": gap_value,
            "certified": cert.certified,
        }
    ]


def _cmd_bound(config: RunConfig):
    _, factor = _build_factor(config)
    p = path_greedy_approx(factor, lookahead=config.lookahead, eig_tol=config.eig_tol)
    certs = certify_path(
        factor, p, jobs=config.jobs, cert_tol=config.cert_tol, eig_tol=config.eig_tol,
        shrink_tol=config.epsilon,
    )
    pool = build_bound_pool(
        factor, path=p, certificates=certs, grid_size=config.rho_grid,
        jobs=config.jobs, eig_tol=config.eig_tol,
    )
    ks = [config.k] if config.k is not None else list(range(1, factor.n + 1))
    return {
        "phi_bounds": [{"rho": rho, "phi_upper": phi} for rho, phi in pool],
        "card_bounds": [{"k": k, "upper_bound": card_bound(pool, k)} for k in ks],
    }


def _split_response(data: np.ndarray) -> SubsetProblem:
    if data.shape[1] < 2:
        raise ValueError("subset input needs at least two columns (regressors plus response)")
    return SubsetProblem(X=data[:, :-1], y=data[:, -1])


def _cmd_subset(config: RunConfig):
    if config.k is None and config.pattern is None:
        raise ValueError("subset requires --k or --pattern")
    # regression semantics: never center behind the user's back
    data = ingest(config.input_path, "data", center=False)
    prob = _split_response(data)
    if config.pattern is not None:
        k = len(config.pattern)
    else:
        k = config.k
    forward = greedy_subset(prob, k, "forward")
    backward = greedy_subset(prob, k, "backward")
    if config.pattern is not None:
        chosen = tuple(sorted(config.pattern))
    else:
        err_f, err_b = ls_error(prob, forward), ls_error(prob, backward)
        chosen = backward if err_b <= err_f else forward
    cert = subset_certify(
        prob, chosen, grid_size=config.rho_grid, eig_tol=config.eig_tol, jobs=config.jobs
    )
    return {
        "forward": {"pattern": _one_based(forward), "ls_error": ls_error(prob, forward)},
        "backward": {"pattern": _one_based(backward), "ls_error": ls_error(prob, backward)},
        "certificate": {
            "pattern": _one_based(cert.pattern),
            "s0": cert.s0,
            "status": cert.status,
            "certified": cert.certified,
            "error_upper": cert.error_upper,
            "error_lower": cert.error_lower,
            "sparse_bound": cert.sparse_bound,
        },
    }


def _cmd_rip(config: RunConfig):
    if config.S is None:
        raise ValueError("rip requires --S")
    data = ingest(config.input_path, "data", center=False)
    report = rip_bounds(data, config.S, grid_size=config.rho_grid, eig_tol=config.eig_tol, jobs=config.jobs)
    return {
        "S": report.S,
        "upper_max_eig": report.upper_max_eig,
        "lower_min_eig": report.lower_min_eig,
        "delta_upper": report.delta_upper,
        "delta_2s": report.delta_2s,
        "delta_3s": report.delta_3s,
        "ct_holds": report.ct_holds,
    }


def _oracle_task(config: RunConfig) -> str:
    if config.task is not None:
        return config.task
    if config.rho is not None:
        return "phi"
    if config.mode == "gram" and config.k is not None:
        return "eigmax"
    if config.mode == "data" and config.S is not None:
        return "delta"
    if config.mode == "data" and config.k is not None:
        return "subset"
    raise ValueError("oracle needs --task or a disambiguating flag (--k, --rho, --S)")


def _cmd_oracle(config: RunConfig):
    budget = OracleBudget(max_enumerations=config.budget)
    task = _oracle_task(config)
    if task in ("eigmax", "phi"):
        sym = ingest(config.input_path, "gram", center=config.center)
        if task == "eigmax":
            if config.k is None:
                raise ValueError("oracle eigmax requires --k")
            value, pattern = exact_sparse_eigmax(sym, config.k, budget=budget)
            return {"task": task, "value": value, "pattern": _one_based(pattern)}
        if config.rho is None:
            raise ValueError("oracle phi requires --rho")
        value, pattern = exact_phi(sym, config.rho, budget=budget)
        return {"task": task, "value": value, "pattern": _one_based(pattern)}
    data = ingest(config.input_path, "data", center=False)
    if task == "delta":
        if config.S is None:
            raise ValueError("oracle delta requires --S")
        return {"task": task, "value": exact_delta(data, config.S, budget=budget)}
    if task == "subset":
        if config.k is None:
            raise ValueError("oracle subset requires --k")
        prob = _split_response(data)
        value, pattern = exact_subset(prob.X, prob.y, config.k, budget=budget)
        return {"task": task, "value": value, "pattern": _one_based(pattern)}
    raise ValueError(f"unknown oracle task {task!r}")


_COMMANDS = {
    "path": _cmd_path,
    "certify": _cmd_certify,
    "bound": _cmd_bound,
    "subset": _cmd_subset,
    "rip": _cmd_rip,
    "oracle": _cmd_oracle,
}


def _csv_rows(config: RunConfig, results: dict) -> list[str]:
    if config.command == "certify":
        lines = ["k,variance,upper_bound,gap,certified"]
        for row in results["curve"]:
            lines.append(
                ",".join(
                    [
                        str(row["k"]),
                        _fmt_float(row["variance"]),
                        _fmt_float(row["upper_bound"]),
                        _fmt_float(row["gap"]),
                        "1" if row["certified"] else "0",
                    ]
                )
            )
        return lines
    if config.command == "path":
        lines = ["method,k,indices,variance,score"]
        for block in results["paths"]:
            for row in block["points"]:
                score = row["score"]
                lines.append(
                    ",".join(
                        [
                            block["method"],
                            str(row["k"]),
                            ";".join(str(i) for i in row["indices"]),
                            _fmt_float(row["variance"]),
                            "" if score is None else _fmt_float(score),
                        ]
                    )
                )
        return lines
    if config.command == "bound":
        lines = ["k,upper_bound"]
        for row in results["card_bounds"]:
            lines.append(f'{row["k"]},{_fmt_float(row["upper_bound"])}')
        return lines
    raise ValueError(f"csv output is not supported for command {config.command!r}")


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns (exit code, report dict)."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        raise ValueError(f"unknown command {config.command!r}")
    results = handler(config)
    config_echo = asdict(config)
    config_echo["pattern"] = None if config.pattern is None else _one_based(config.pattern)
    report = {
        "command": config.command,
        "config": config_echo,
        "tolerances": {
            "cert_tol": config.cert_tol,
            "eig_tol": config.eig_tol,
            "epsilon": config.epsilon,
            "sqrt_tol": DEFAULT_SQRT_TOL,
            "display_cert_tol": DISPLAY_CERT_TOL,
        },
        "results": results,
        "version": __version__,
    }
    text = (
        "\n".join(_csv_rows(config, results)) + "\n"
        if config.fmt == "csv"
        else _dump_json(_to_jsonable(report)) + "\n"
    )
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0, report


def _parse_pattern(text: str) -> tuple[int, ...]:
    try:
        parts = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ValueError(f"cannot parse pattern {text!r}: expected comma-separated integers") from exc
    if not parts:
        raise ValueError("pattern flag is empty")
    if min(parts) < 1:
        raise ValueError("pattern indices are 1-based and must be positive")
    return tuple(p - 1 for p in parts)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-eig",
        description="Greedy paths, dual certificates and bounds for sparse eigenvalue problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("path", "compute selection paths (sort, threshold, greedy)"),
        ("certify", "certify patterns via duality-gap minimization"),
        ("bound", "penalized and cardinality-constrained upper bounds"),
        ("subset", "greedy subset selection with optimality certificate"),
        ("rip", "restricted-isometry bounds for a frame"),
        ("oracle", "exhaustive reference solutions (small instances)"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="matrix file (headerless, comma or whitespace delimited)")
        p.add_argument("--mode", choices=("gram", "data"), default="gram")
        center = p.add_mutually_exclusive_group()
        center.add_argument("--center", dest="center", action="store_true", default=True)
        center.add_argument("--no-center", dest="center", action="store_false")
        p.add_argument("--method", choices=("all",) + tuple(_PATH_METHODS), default="all")
        p.add_argument("--k", type=int, default=None, help="target cardinality")
        p.add_argument("--S", type=int, default=None, help="isometry sparsity level")
        p.add_argument("--pattern", type=str, default=None, help="1-based indices, e.g. 1,4,7")
        p.add_argument("--rho", type=float, default=None, help="penalty level (oracle phi)")
        p.add_argument("--rho-grid", type=int, default=50, dest="rho_grid")
        p.add_argument("--cert-tol", type=float, default=DEFAULT_CERT_TOL, dest="cert_tol")
        p.add_argument("--eig-tol", type=float, default=DEFAULT_EIG_TOL, dest="eig_tol")
        p.add_argument("--epsilon", type=float, default=1e-8, help="bisection shrink tolerance")
        p.add_argument("--lookahead", type=int, default=1)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--budget", type=int, default=2_000_000)
        p.add_argument("--task", choices=("eigmax", "phi", "subset", "delta"), default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    return parser


def _configure_logging() -> None:
    name = os.environ.get("SPARSE_EIG_LOG", "warn").strip().lower()
    level = _LOG_LEVELS.get(name)
    logging.basicConfig(stream=sys.stderr, level=level or logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if level is None and name:
        logging.getLogger("sparseig").warning("unknown SPARSE_EIG_LOG value %r, using warn", name)


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        pattern = _parse_pattern(args.pattern) if args.pattern else None
        config = RunConfig(
            command=args.command,
            input_path=args.input,
            mode=args.mode,
            center=args.center,
            method=args.method,
            k=args.k,
            S=args.S,
            pattern=pattern,
            rho=args.rho,
            rho_grid=args.rho_grid,
            cert_tol=args.cert_tol,
            eig_tol=args.eig_tol,
            epsilon=args.epsilon,
            lookahead=args.lookahead,
            jobs=args.jobs,
            seed=args.seed,
            budget=args.budget,
            out=args.out,
            fmt=args.fmt,
            task=args.task,
        )
        code, _ = run(config)
        return code
    except BudgetExceeded as exc:
        log.error("budget exceeded: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SparseEigError, ValueError, OSError) as exc:
        log.error("input error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

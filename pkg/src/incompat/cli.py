"""Command-line interface.

Every subcommand emits JSON or CSV. Floats are written as their shortest
round-trip decimal, so identical arguments give byte-identical output.

Exit codes: 0 success, 1 a proved inequality failed its audit, 2 input
could not be parsed, 3 dimension or count mismatch, 4 any other input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audit import CORPORA, audit_failed, run_audit
from .bounds import VARIANTS, audit_bound, qp_qf_lower, sdp_q_lower
from .distance import q_alpha_directional, qf_qubit_closed, qf_subspace_closed
from .estimators import MEASURES, EntropicBound, IncompatibilityMeasure, check_observables
from .eur import h2_mub_closed, t2_succ_avg
from .exceptions import DimensionMismatch, IncompatError, LengthMismatch, OutOfRange, ParseError, UnknownFigure
from .fidelity import fmax_ascent, q_closed_form, q_mub_closed, q_qubit_closed, q_subspace_closed
from .linalg import Ensemble, Observable, eigenstate_ensemble, mub_bases, subspace_pair
from .qkd import EveStrategy, optimal_strategy, simulate_error_rate
from .search import SearchConfig

EXIT_AUDIT, EXIT_PARSE, EXIT_DIM, EXIT_INPUT = 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    restarts: int = 64
    tol: float = 1e-6
    output_format: str = "json"
    output_path: str | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise OutOfRange("tol must be positive")
        if self.restarts < 1:
            raise OutOfRange("restarts must be at least 1")
        if self.output_format not in ("json", "csv"):
            raise OutOfRange(f"unknown format {self.output_format!r}")

    def search(self) -> SearchConfig:
        return SearchConfig(restarts=self.restarts, seed=self.seed, tol=self.tol)


# ---------------------------------------------------------------------------
# serialization


def _plain(value):
    """Convert numpy scalars and arrays to JSON-native values."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


def render(records, fmt: str) -> str:
    """Render a record (dict) or a table (list of dicts)."""
    records = _plain(records)
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    rows = records if isinstance(records, list) else [records]
    header = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row.get(k)) for k in header])
    return buf.getvalue()


def _emit(records, run: RunConfig) -> None:
    text = render(records, run.output_format)
    if run.output_path:
        Path(run.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def load_observables(paths) -> list[Observable]:
    """Each file holds one observable object or a list of them."""
    observables = []
    for path in paths:
        data = _load_json(path)
        items = data if isinstance(data, list) else [data]
        for item in items:
            if not isinstance(item, dict):
                raise ParseError(f"{path}: expected an observable object")
            observables.append(Observable.from_json(item))
    return observables


def load_ensemble(path: str) -> Ensemble:
    data = _load_json(path)
    if isinstance(data, dict) and "states" in data:
        return Ensemble.from_json(data)
    items = data if isinstance(data, list) else [data]
    return eigenstate_ensemble(Observable.from_json(item) for item in items)


# ---------------------------------------------------------------------------
# subcommands


def _qubit_pair(c: float) -> tuple[np.ndarray, np.ndarray]:
    return np.array([0.0, 0.0, 1.0]), np.array([np.sqrt(max(0.0, 1.0 - c * c)), 0.0, c])


def qubit_record(c: float) -> dict:
    if not -1.0 <= c <= 1.0:
        raise OutOfRange(f"cos_delta must lie in [-1, 1], got {c}")
    a, b = _qubit_pair(c)
    q, _ = q_qubit_closed(a, b)
    h2 = -np.log2(0.75 + 0.25 * abs(c))
    return {
        "cos_delta": c,
        "Q": q,
        "Q_F": qf_qubit_closed(a, b),
        "t2_standard": 0.25 * (1.0 - abs(c)),
        "t2_succ": 0.25 * (1.0 - c * c),
        "h2_bound": 1.0 - 2.0 ** (-h2),
    }


def cmd_qubit(args, run):
    _emit(qubit_record(args.cos_delta), run)


def cmd_mub(args, run):
    N, d = args.N, args.d
    mub_bases(d, N)  # validates the pair (N, d)
    qf_dir = 1.0 - 1.0 / d
    _emit(
        {
            "N": N,
            "d": d,
            "Q": q_mub_closed(N, d),
            "Q_F": (1.0 - 1.0 / N) * qf_dir,
            "t2_standard": q_mub_closed(N, d),
            "t2_succ": 0.5 * qf_dir if N == 2 else None,
            "h2_standard": h2_mub_closed(N, d),
        },
        run,
    )


def cmd_subspace(args, run):
    d, d_c = args.d, args.d_c
    A, B = subspace_pair(d, d_c)
    _emit({"d": d, "d_c": d_c, "Q": q_subspace_closed(d, d_c), "Q_F": qf_subspace_closed(d, d_c), "t2_succ": t2_succ_avg(A, B)}, run)


def cmd_measure(args, run):
    observables = check_observables(load_observables(args.files))
    est = IncompatibilityMeasure(args.measure, args.method, run.restarts, seed=run.seed, tol=run.tol).fit(observables)
    record = {"measure": args.measure, "value": est.value_, "method": est.method_}
    if args.measure == "Q":
        record["povm"] = est.povm_.to_json() if est.povm_ is not None else None
    else:
        record["directional"] = est.directional_
    _emit(record, run)


def cmd_eur(args, run):
    observables = load_observables(args.files)
    est = EntropicBound(args.kind, args.method, run.restarts, seed=run.seed, tol=run.tol).fit(observables)
    minimizer = None if est.minimizer_ is None else [[z.real, z.imag] for z in est.minimizer_.amplitudes]
    _emit({"kind": args.kind, "value": est.value_, "method": est.method_, "minimizer": minimizer}, run)


def cmd_bound(args, run):
    observables = check_observables(load_observables(args.files))
    config = run.search()
    if args.kind == "sdp":
        report = sdp_q_lower(eigenstate_ensemble(observables))
        closed = q_closed_form(observables)
        if closed is not None:
            report = audit_bound(report, closed[0], "closed_form")
        else:
            q_upper = fmax_ascent(eigenstate_ensemble(observables), config).q_upper
            report = audit_bound(report, min(1.0, max(0.0, q_upper)), "brute_force_lower_estimate")
    else:
        if len(observables) != 2:
            raise DimensionMismatch("the quadratic program takes exactly two observables")
        A, B = observables
        report = qp_qf_lower(A, B, args.variant)
        oracle = q_alpha_directional(A, B, "F", config)
        kind = "closed_form" if oracle.method == "closed_form" else "brute_force_lower_estimate"
        report = audit_bound(report, oracle.value, kind)
    _emit(report.to_json(), run)


def cmd_qkd(args, run):
    S = load_ensemble(args.ensemble)
    if args.strategy == "optimal":
        eve = optimal_strategy(S, config=run.search())
    elif args.strategy == "none":
        eve = None
    else:
        try:
            eve = EveStrategy.from_json(_load_json(args.strategy))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, IncompatError):
                raise
            raise ParseError(f"malformed strategy JSON: {exc}") from exc
    _emit(simulate_error_rate(S, eve, args.trials, run.seed).to_json(), run)


def figure_table(name: str, d: int = 20) -> list[dict]:
    if name == "fig1":
        rows = []
        for i in range(101):
            c = i / 100
            a, b = _qubit_pair(c)
            rows.append({"x": c, "Q": q_qubit_closed(a, b)[0], "Q_F": qf_qubit_closed(a, b)})
        return rows
    if name == "fig2":
        return [{"x": d_c, "Q": q_subspace_closed(d, d_c), "Q_F": qf_subspace_closed(d, d_c)} for d_c in range(d)]
    raise UnknownFigure(f"unknown figure {name!r}; expected fig1 or fig2")


def cmd_figure(args, run):
    _emit(figure_table(args.name, args.d), run)


def cmd_audit(args, run):
    rows = run_audit(args.corpus, run.search())
    _emit([r.as_dict() for r in rows], run)
    return EXIT_AUDIT if audit_failed(rows) else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--restarts", type=int, default=64)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    common.add_argument("--out", dest="output_path", default=None)

    parser = argparse.ArgumentParser(prog="incompat", description="Incompatibility measures for quantum observables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qubit", parents=[common], help="closed forms for a qubit pair")
    p.add_argument("--cos-delta", type=float, required=True)
    p.set_defaults(func=cmd_qubit)

    p = sub.add_parser("mub", parents=[common], help="closed forms for N mutually unbiased bases")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_mub)

    p = sub.add_parser("subspace", parents=[common], help="closed forms for a pair commuting on a subspace")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--d-c", type=int, required=True)
    p.set_defaults(func=cmd_subspace)

    p = sub.add_parser("measure", parents=[common], help="incompatibility of observables read from JSON files")
    p.add_argument("files", nargs="+")
    p.add_argument("--measure", choices=MEASURES, default="Q")
    p.add_argument("--method", choices=("auto", "closed_form", "search"), default="auto")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("eur", parents=[common], help="entropic uncertainty bounds")
    p.add_argument("files", nargs="+")
    p.add_argument("--kind", choices=("t2", "h2", "t2_succ"), default="t2")
    p.add_argument("--method", choices=("auto", "closed_form", "search"), default="auto")
    p.set_defaults(func=cmd_eur)

    p = sub.add_parser("bound", parents=[common], help="SDP or quadratic-program bound with verdict")
    p.add_argument("files", nargs="+")
    p.add_argument("--kind", choices=("sdp", "qp"), default="sdp")
    p.add_argument("--variant", choices=VARIANTS, default="as_stated")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("qkd", parents=[common], help="intercept-resend error rate simulation")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--strategy", default="optimal", help="strategy JSON file, 'optimal' or 'none'")
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_qkd)

    p = sub.add_parser("figure", parents=[common], help="figure data tables")
    p.add_argument("name")
    p.add_argument("--d", type=int, default=20)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("audit", parents=[common], help="inequality audit over a corpus")
    p.add_argument("--corpus", choices=CORPORA, required=True)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = RunConfig(args.seed, args.restarts, args.tol, args.output_format, args.output_path)
        return args.func(args, run) or 0
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DimensionMismatch, LengthMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except IncompatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""``structnet`` command line: select, matrix, baseline, bench.

Exit codes: 0 success, 1 input/config error, 2 solver hit max_iter
(the report is still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .admm import SolverConfig
from .data import TargetKind, load_csv, standardize
from .errors import MaxIterationsExceeded, StructNetError
from .graphs import dump_weights_csv
from .info import build_interaction_matrix, feature_graphs
from .selection import (
    Method,
    accuracy_curve,
    check_k_list,
    select_features,
    synthetic_benchmark,
)

log = logging.getLogger("structnet")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    input: str
    target: str
    target_kind: str
    method: str
    solver: dict
    seed: int
    standardize: bool
    zero_diagonal: bool
    output: str | None


def _add_data_args(p):
    p.add_argument("--input", required=True, help="CSV file with one header row")
    p.add_argument("--target", required=True, help="target column name or index")
    p.add_argument("--target-kind", choices=["continuous", "discrete"], default="discrete")


def _add_solver_args(p):
    d = SolverConfig()
    p.add_argument("--lambda1", type=float, default=d.lambda1)
    p.add_argument("--lambda2", type=float, default=d.lambda2)
    p.add_argument("--lambda3", type=float, default=d.lambda3)
    p.add_argument("--rho", type=float, default=d.rho)
    p.add_argument("--max-iter", type=int, default=d.max_iter)
    p.add_argument("--eps-abs", type=float, default=d.eps_abs)
    p.add_argument("--eps-rel", type=float, default=d.eps_rel)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="JSON report path (default: stdout)")


def _config(args) -> SolverConfig:
    return SolverConfig(
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        lambda3=args.lambda3,
        rho=args.rho,
        max_iter=args.max_iter,
        eps_abs=args.eps_abs,
        eps_rel=args.eps_rel,
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _run_selection(args, method: Method, zero_diagonal: bool) -> int:
    cfg = _config(args)
    data, target = load_csv(args.input, args.target, args.target_kind)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MaxIterationsExceeded)
        outcome = select_features(
            data,
            target,
            method,
            cfg,
            standardized=not args.no_standardize,
            zero_diagonal=zero_diagonal,
        )
    manifest = RunManifest(
        input=args.input,
        target=str(args.target),
        target_kind=args.target_kind,
        method=method.value,
        solver=outcome.report.config,
        seed=args.seed,
        standardize=not args.no_standardize,
        zero_diagonal=zero_diagonal,
        output=args.output,
    )
    payload = {
        "manifest": asdict(manifest),
        "selection": outcome.report.to_dict(),
        "solver": outcome.result.to_dict(),
    }
    _emit(json.dumps(payload, indent=2), args.output)
    log.info("finished %s at %s", method.value, time.strftime("%Y-%m-%dT%H:%M:%S"))
    if not outcome.result.converged:
        print(
            f"structnet: solver did not converge in {cfg.max_iter} iterations; report written",
            file=sys.stderr,
        )
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_select(args) -> int:
    return _run_selection(args, Method.INELASTICNET, args.zero_diagonal)


def cmd_baseline(args) -> int:
    return _run_selection(args, Method.parse(args.method), False)


def cmd_matrix(args) -> int:
    data, target = load_csv(args.input, args.target, args.target_kind)
    if not args.no_standardize:
        data = standardize(data)[0]
    graphs = feature_graphs(data, target)
    im = build_interaction_matrix(data, target, zero_diagonal=args.zero_diagonal, graphs=graphs)
    text = im.to_json() if args.format == "json" else im.to_csv().rstrip("\n")
    _emit(text, args.output)
    if args.dump_graphs:
        out = Path(args.dump_graphs)
        out.mkdir(parents=True, exist_ok=True)
        g, t = graphs
        for name, gi, ti in zip(data.feature_names, g, t):
            dump_weights_csv(out / f"graph_{name}.csv", gi)
            if target.kind is TargetKind.DISCRETE:
                dump_weights_csv(out / f"target_graph_{name}.csv", ti)
        if target.kind is TargetKind.CONTINUOUS:
            dump_weights_csv(out / "target_graph.csv", t[0])
    return EXIT_OK


def _parse_list(text: str, cast=str) -> list:
    return [cast(x.strip()) for x in text.split(",") if x.strip()]


def cmd_bench(args) -> int:
    cfg = _config(args)
    methods = [Method.parse(m) for m in _parse_list(args.methods)]
    if not methods:
        raise StructNetError("--methods is empty")
    k_list = _parse_list(args.k_list, int)
    n_features = args.n_relevant * (1 + args.n_duplicates) + args.n_noise
    check_k_list(k_list, n_features)
    if args.seeds < 1:
        raise StructNetError("--seeds must be >= 1")

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    curves = {m.value: [] for m in methods}
    precision = {m.value: [] for m in methods}
    n_converged = {m.value: 0 for m in methods}
    for seed in range(args.seed, args.seed + args.seeds):
        bench = synthetic_benchmark(
            args.n_relevant, args.n_noise, args.n_duplicates, args.correlation, args.samples, seed
        )
        for m in methods:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", MaxIterationsExceeded)
                outcome = select_features(bench.data, bench.target, m, cfg)
            n_converged[m.value] += outcome.result.converged
            top = set(outcome.report.top(len(bench.relevant)))
            if bench.relevant:
                precision[m.value].append(len(top & bench.relevant) / len(bench.relevant))
            rep = accuracy_curve(
                bench.data, bench.target, m, k_list, cfg,
                folds=args.folds, k_neighbors=args.k_neighbors, seed=seed,
                ranking=outcome.report.ranking,
            )
            curves[m.value].append([r[1] for r in rep.rows])

    summary = {
        "manifest": {
            "n_relevant": args.n_relevant,
            "n_noise": args.n_noise,
            "n_duplicates": args.n_duplicates,
            "correlation": args.correlation,
            "samples": args.samples,
            "seeds": list(range(args.seed, args.seed + args.seeds)),
            "k_list": k_list,
            "folds": args.folds,
            "k_neighbors": args.k_neighbors,
            "solver": cfg.to_dict(),
        },
        "methods": {},
    }
    for m in methods:
        acc = np.array(curves[m.value])
        mean, std = acc.mean(axis=0), acc.std(axis=0)
        path = out / f"curve_{m.value}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("k,mean_accuracy,std\n")
            for k, a, s in zip(k_list, mean, std):
                fh.write(f"{k},{a:.17g},{s:.17g}\n")
        summary["methods"][m.value] = {
            "curve_csv": path.name,
            "mean_accuracy": [float(a) for a in mean],
            "std": [float(s) for s in std],
            "top_k_precision": float(np.mean(precision[m.value])) if precision[m.value] else None,
            "converged_runs": n_converged[m.value],
        }
    (out / "bench.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="structnet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("select", help="InElasticNet feature selection")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--zero-diagonal", action="store_true", help="null the diagonal of W")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("baseline", help="ridge / lasso / elastic net selection")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--method", required=True, help="ridge, lasso or elasticnet")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("matrix", help="compute and export the interaction matrix W")
    _add_data_args(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--dump-graphs", metavar="DIR", help="write each M x M weight matrix as CSV")
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--zero-diagonal", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("bench", help="synthetic accuracy-vs-k benchmark")
    _add_solver_args(p)
    p.add_argument("--seeds", type=int, default=3, help="number of seeds, starting at --seed")
    p.add_argument("--k-list", default="1,2,5,10,20")
    p.add_argument("--methods", default="lasso,elasticnet,inelasticnet")
    p.add_argument("--correlation", type=float, default=0.9)
    p.add_argument("--n-relevant", type=int, default=5)
    p.add_argument("--n-noise", type=int, default=40)
    p.add_argument("--n-duplicates", type=int, default=1)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--k-neighbors", type=int, default=5)
    p.set_defaults(func=cmd_bench, output="bench_out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (StructNetError, OSError) as exc:
        print(f"structnet: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

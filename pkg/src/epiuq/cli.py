"""Command-line pipeline: synth -> quantify -> eval -> rank -> report.

Exit codes: 0 success, 2 input validation, 3 numerical failure,
4 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import EvaluationRecord, default_beta_grid, ood_detection, selective_prediction
from .credal import DEFAULT_SUBSET_CAP
from .dataio import (
    MANIFEST_SUFFIX,
    RunManifest,
    file_sha256,
    load_manifest,
    load_predictions,
    read_result,
    try_load_manifest,
    write_predictions,
    write_result,
    write_scores_csv,
)
from .exceptions import DataFormatError, EnumerationCapError, NumericalError
from .intervals import DEFAULT_VERTEX_CAP, build_intervals
from .measures import MEASURE_IDS, resolve_measures, score_prediction_set
from .oracles import (
    DEFAULT_GRID_STEPS,
    SimplexGrid,
    gh_direct,
    grid_minimize,
    mmi_direct,
)
from .ranking import SCOPE_MEASURES, RunMatrix, aggregate_net_wins, net_wins
from .simplex import mean_prediction
from .synth import synth_generate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_CAP = 4

_WD_METHOD_BY_PREFACTOR = {"eq9": "auto", "eq8": "dual"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epiuq",
        description="Second-order uncertainty measures, benchmarks, and rankings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quantify", help="score a prediction file with uncertainty measures")
    q.add_argument("--input", required=True, help="prediction file (JSON lines)")
    q.add_argument("--measures", default="all", help="comma list or group: all, dist, credal")
    q.add_argument("--output", required=True, help="score CSV to write")
    _add_measure_flags(q)
    q.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    q.add_argument(
        "--oracle",
        action="store_true",
        help="cross-check scores against brute-force references where tractable",
    )
    q.set_defaults(func=cmd_quantify)

    e = sub.add_parser("eval", help="run a downstream benchmark")
    esub = e.add_subparsers(dest="eval_task", required=True)

    es = esub.add_parser("selective", help="accuracy-rejection curve for one measure")
    es.add_argument("--input", required=True, help="prediction file")
    es.add_argument("--measure", required=True, choices=MEASURE_IDS)
    es.add_argument("--betas", default="default", help='"default", comma list, or start:stop:step')
    es.add_argument("--output", required=True, help="result JSON to write")
    _add_measure_flags(es)
    _add_label_flags(es)
    es.set_defaults(func=cmd_eval_selective)

    eo = esub.add_parser("ood", help="AUROC separating two prediction files")
    eo.add_argument("--id", dest="id_file", required=True, help="in-distribution prediction file")
    eo.add_argument("--ood", dest="ood_file", required=True, help="out-of-distribution prediction file")
    eo.add_argument("--measure", required=True, choices=MEASURE_IDS)
    eo.add_argument("--output", required=True, help="result JSON to write")
    _add_measure_flags(eo)
    _add_label_flags(eo)
    eo.set_defaults(func=cmd_eval_ood)

    r = sub.add_parser("rank", help="net-win tables from a directory of eval results")
    r.add_argument("--runs", required=True, help="directory of eval result files")
    r.add_argument("--scope", required=True, choices=sorted(SCOPE_MEASURES))
    r.add_argument("--alpha", type=float, default=0.05)
    r.add_argument("--output", required=True, help="table JSON to write")
    r.set_defaults(func=cmd_rank)

    s = sub.add_parser("synth", help="generate a synthetic prediction file")
    s.add_argument("--k", type=int, required=True, help="number of classes")
    s.add_argument("--m", type=int, required=True, help="members per prediction set")
    s.add_argument("--n", type=int, required=True, help="number of samples")
    s.add_argument("--error-rate", type=float, required=True)
    s.add_argument("--separation", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--output", required=True, help="prediction file to write")
    _add_label_flags(s, dataset_default="synthetic", model_default="synthetic")
    s.set_defaults(func=cmd_synth)

    rep = sub.add_parser("report", help="flatten results into plot-ready CSV tables")
    rep.add_argument("--arc", nargs="*", default=[], help="selective-prediction result files")
    rep.add_argument("--sig", nargs="*", default=[], help="rank table files")
    rep.add_argument("--outdir", required=True)
    rep.set_defaults(func=cmd_report)

    return parser


def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--wd-prefactor",
        choices=sorted(_WD_METHOD_BY_PREFACTOR),
        default="eq9",
        help="eq9: binary median closed form when K=2; eq8: halved L1 solver always "
        "(the two agree numerically at K=2)",
    )
    p.add_argument("--vertex-cap", type=int, default=DEFAULT_VERTEX_CAP)
    p.add_argument("--subset-cap", type=int, default=DEFAULT_SUBSET_CAP)


def _add_label_flags(
    p: argparse.ArgumentParser,
    dataset_default: str | None = None,
    model_default: str | None = None,
) -> None:
    p.add_argument("--dataset", default=dataset_default, help="dataset label for manifests")
    p.add_argument("--model", default=model_default, help="predictive-model label for manifests")
    p.add_argument("--run", type=int, default=None, help="run index label for manifests")


def _labels(args, input_path) -> tuple[str, str, int]:
    """Labels for a result: flag > input manifest > filename defaults."""
    inherited = try_load_manifest(input_path) if input_path is not None else None
    dataset = args.dataset
    if dataset is None:
        dataset = inherited.dataset if inherited and inherited.dataset else Path(str(input_path)).stem
    model = args.model
    if model is None:
        model = inherited.model if inherited and inherited.model else "default"
    run = args.run
    if run is None:
        run = inherited.run if inherited else 0
    return str(dataset), str(model), int(run)


def _measure_kwargs(args) -> dict:
    return {
        "wd_method": _WD_METHOD_BY_PREFACTOR[args.wd_prefactor],
        "vertex_cap": args.vertex_cap,
        "subset_cap": args.subset_cap,
    }


def _score_batch(payload) -> list[dict]:
    probs_list, measures, kwargs = payload
    return [score_prediction_set(p, measures, **kwargs) for p in probs_list]


def _score_records(records, measures, kwargs, workers: int = 1) -> list[dict]:
    probs = [rec.probs for rec in records]
    if workers <= 1:
        return _score_batch((probs, measures, kwargs))
    chunks = [c for c in np.array_split(np.arange(len(probs)), workers * 4) if c.size]
    payloads = [([probs[i] for i in idx], measures, kwargs) for idx in chunks]
    out: list[dict] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_score_batch, payloads):
            out.extend(part)
    return out


def cmd_quantify(args) -> int:
    if args.workers < 1:
        raise ValueError(f"--workers must be >= 1, got {args.workers}")
    records = load_predictions(args.input)
    measures = resolve_measures(args.measures)
    kwargs = _measure_kwargs(args)
    scores = _score_records(records, measures, kwargs, workers=args.workers)
    if args.oracle:
        _oracle_check(records, scores, measures, kwargs)
    rows = [
        (rec.sample_id, m, row[m])
        for rec, row in zip(records, scores)
        for m in measures
    ]
    write_scores_csv(args.output, rows)
    inherited = try_load_manifest(args.input)
    RunManifest(
        command="quantify",
        dataset=inherited.dataset if inherited else Path(args.input).stem,
        model=inherited.model if inherited else "default",
        task="quantify",
        run=inherited.run if inherited else 0,
        measures=measures,
        seed=inherited.seed if inherited else None,
        inputs={Path(args.input).name: file_sha256(args.input)},
    ).write(args.output)
    return EXIT_OK


def _oracle_check(records, scores, measures, kwargs) -> None:
    """Recompute scores with the brute-force references where tractable.

    Grid checks hold up to the lattice resolution; exact oracles must
    agree to 1e-9. Any violation is a numerical failure.
    """
    for rec, row in zip(records, scores):
        arr = rec.probs
        m, k = arr.shape
        iv = build_intervals(arr) if any(x in ("hdiff", "gh", "mmi") for x in measures) else None
        for name in measures:
            got = row[name]
            if name == "mi":
                want = _mi_fsum(arr)
                _oracle_assert(rec, name, got, want, 1e-9)
            elif name == "lwv":
                want = _lwv_fsum(arr)
                _oracle_assert(rec, name, got, want, 1e-9)
            elif name == "wd":
                if k not in DEFAULT_GRID_STEPS or m > 8:
                    _oracle_skip(rec, name, "no tractable lattice")
                    continue
                step = DEFAULT_GRID_STEPS[k]
                grid = SimplexGrid(k, step)
                best = grid_minimize(
                    lambda pts: 0.5 * np.abs(arr[None, :, :] - pts[:, None, :]).sum(axis=(1, 2)),
                    grid,
                    vectorized=True,
                )
                slack = 0.5 * m * k * step + 1e-9
                if got > best.value + 1e-9 or best.value - got > slack:
                    _oracle_fail(rec, name, got, best.value, slack)
            elif name == "hdiff":
                if k not in DEFAULT_GRID_STEPS:
                    _oracle_skip(rec, name, "no tractable lattice")
                    continue
                step = DEFAULT_GRID_STEPS[k]
                grid = SimplexGrid(k, step)
                ent = lambda pts: -np.where(pts > 0, pts * np.log2(np.where(pts > 0, pts, 1.0)), 0.0).sum(axis=1)
                try:
                    top = -grid_minimize(lambda pts: -ent(pts), grid, iv, vectorized=True).value
                    bot = grid_minimize(ent, grid, iv, vectorized=True).value
                except ValueError:
                    _oracle_skip(rec, name, "intervals tighter than the lattice")
                    continue
                slack = 2.0 * k * step * (math.log2(1.0 / step) + 1.0) + 1e-9
                if got < (top - bot) - 1e-9 or got - (top - bot) > slack:
                    _oracle_fail(rec, name, got, top - bot, slack)
            elif name == "gh":
                if k > 12:
                    _oracle_skip(rec, name, "K over submask-walk cap")
                    continue
                _oracle_assert(rec, name, got, gh_direct(iv), 1e-9)
            elif name == "mmi":
                if k > 16:
                    _oracle_skip(rec, name, "K over subset-loop cap")
                    continue
                _oracle_assert(rec, name, got, mmi_direct(iv), 1e-9)


def _oracle_assert(rec, name, got, want, tol) -> None:
    if abs(got - want) > tol:
        _oracle_fail(rec, name, got, want, tol)


def _oracle_fail(rec, name, got, want, tol) -> None:
    raise NumericalError(
        f"oracle mismatch on sample {rec.sample_id!r}, measure {name}: "
        f"got {got!r}, reference {want!r}, allowance {tol!r}"
    )


def _oracle_skip(rec, name, why: str) -> None:
    warnings.warn(f"oracle check skipped for sample {rec.sample_id!r}, measure {name}: {why}")


def _mi_fsum(arr) -> float:
    m, k = arr.shape
    mean = [math.fsum(arr[i, j] for i in range(m)) / m for j in range(k)]

    def ent(p):
        return -math.fsum(x * math.log2(x) for x in p if x > 0.0)

    return ent(mean) - math.fsum(ent(arr[i]) for i in range(m)) / m


def _lwv_fsum(arr) -> float:
    m, k = arr.shape
    total = 0.0
    for j in range(k):
        mean = math.fsum(arr[i, j] for i in range(m)) / m
        total += math.fsum((arr[i, j] - mean) ** 2 for i in range(m)) / m
    return total


def _parse_betas(spec: str) -> np.ndarray:
    if spec == "default":
        return default_beta_grid()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"beta range must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("beta step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(count), 12)
    return np.array([float(p) for p in spec.split(",") if p.strip()], dtype=float)


def _evaluation_records(records, measure: str, kwargs) -> list[EvaluationRecord]:
    out = []
    for rec in records:
        pooled = mean_prediction(rec.probs)
        score = score_prediction_set(rec.probs, (measure,), **kwargs)[measure]
        out.append(
            EvaluationRecord(
                sample_id=rec.sample_id,
                true_label=rec.label,
                predicted_label=pooled.argmax_class,
                scores={measure: score},
            )
        )
    return out


def cmd_eval_selective(args) -> int:
    records = load_predictions(args.input)
    kwargs = _measure_kwargs(args)
    betas = _parse_betas(args.betas)
    evals = _evaluation_records(records, args.measure, kwargs)
    curve = selective_prediction(evals, args.measure, betas)
    dataset, model, run = _labels(args, args.input)
    payload = {
        "task": "selective",
        "measure": args.measure,
        "dataset": dataset,
        "model": model,
        "run": run,
        "betas": list(curve.betas),
        "accuracies": list(curve.accuracies),
        "auarc": curve.auarc,
        "n_samples": curve.n_samples,
    }
    write_result(args.output, payload)
    RunManifest(
        command="eval selective",
        dataset=dataset,
        model=model,
        task="selective",
        run=run,
        measures=(args.measure,),
        betas=tuple(float(b) for b in curve.betas),
        inputs={Path(args.input).name: file_sha256(args.input)},
    ).write(args.output)
    return EXIT_OK


def cmd_eval_ood(args) -> int:
    id_records = load_predictions(args.id_file)
    ood_records = load_predictions(args.ood_file)
    kwargs = _measure_kwargs(args)
    id_scores = [
        score_prediction_set(r.probs, (args.measure,), **kwargs)[args.measure]
        for r in id_records
    ]
    ood_scores = [
        score_prediction_set(r.probs, (args.measure,), **kwargs)[args.measure]
        for r in ood_records
    ]
    result = ood_detection(id_scores, ood_scores, measure=args.measure)
    dataset, model, run = _labels(args, args.id_file)
    payload = {
        "task": "ood",
        "measure": args.measure,
        "dataset": dataset,
        "model": model,
        "run": run,
        "auroc": result.auroc,
        "n_id": result.n_id,
        "n_ood": result.n_ood,
    }
    write_result(args.output, payload)
    RunManifest(
        command="eval ood",
        dataset=dataset,
        model=model,
        task="ood",
        run=run,
        measures=(args.measure,),
        inputs={
            Path(args.id_file).name: file_sha256(args.id_file),
            Path(args.ood_file).name: file_sha256(args.ood_file),
        },
    ).write(args.output)
    return EXIT_OK


def cmd_rank(args) -> int:
    runs_dir = Path(args.runs)
    if not runs_dir.is_dir():
        raise DataFormatError(f"--runs must be a directory, got {runs_dir}")
    files = sorted(
        p for p in runs_dir.glob("*.json") if not p.name.endswith(MANIFEST_SUFFIX)
    )
    if not files:
        raise DataFormatError(f"no result files in {runs_dir}")
    measures = SCOPE_MEASURES[args.scope]

    cells: dict[tuple[str, str, int], float] = {}
    tasks: set[str] = set()
    datasets: set[str] = set()
    for path in files:
        manifest = load_manifest(path)
        payload = read_result(path)
        task = payload.get("task")
        if task not in ("selective", "ood"):
            raise DataFormatError(f"{path}: expected a selective or ood result, got task={task!r}")
        tasks.add(task)
        datasets.add(str(payload.get("dataset", manifest.dataset)))
        if len(tasks) > 1:
            raise DataFormatError(f"manifest mismatch: mixed benchmark tasks {sorted(tasks)} in {runs_dir}")
        if len(datasets) > 1:
            raise DataFormatError(f"manifest mismatch: mixed datasets {sorted(datasets)} in {runs_dir}")
        measure = payload.get("measure")
        if measure not in MEASURE_IDS:
            raise DataFormatError(f"{path}: unknown measure {measure!r}")
        score_key = "auarc" if task == "selective" else "auroc"
        if score_key not in payload:
            raise DataFormatError(f"{path}: missing {score_key}")
        model = str(payload.get("model", manifest.model))
        run = int(payload.get("run", manifest.run))
        key = (model, str(measure), run)
        if key in cells:
            raise DataFormatError(f"{path}: duplicate result for model={model} measure={measure} run={run}")
        cells[key] = float(payload[score_key])

    task = tasks.pop()
    dataset = datasets.pop()
    models = sorted({model for model, _, _ in cells})
    tables = []
    model_entries = {}
    for model in models:
        runs = sorted({run for mdl, _, run in cells if mdl == model})
        scores = {}
        for measure in measures:
            vals = []
            for run in runs:
                if (model, measure, run) not in cells:
                    raise DataFormatError(
                        f"model {model!r} run {run} lacks a result for measure {measure!r} "
                        f"(scope {args.scope} needs {list(measures)})"
                    )
                vals.append(cells[(model, measure, run)])
            scores[measure] = vals
        matrix = RunMatrix(scores=scores, dataset=dataset, model=model, task=task)
        table = net_wins(matrix, measures, alpha=args.alpha, scope=args.scope)
        tables.append(table)
        model_entries[model] = {
            "n_runs": len(runs),
            "wins": dict(table.wins),
            "losses": dict(table.losses),
            "net": dict(table.net),
            "pairs": [
                {"first": p.first, "second": p.second, "p_value": p.p_value, "significant": p.significant}
                for p in table.pairs
            ],
        }
    agg = aggregate_net_wins(tables)
    payload = {
        "task": "rank",
        "scope": args.scope,
        "alpha": args.alpha,
        "benchmark": task,
        "dataset": dataset,
        "measures": list(measures),
        "models": model_entries,
        "aggregate": {
            "n_models": agg.n_models,
            "wins": dict(agg.wins),
            "losses": dict(agg.losses),
            "net": dict(agg.net),
        },
    }
    write_result(args.output, payload)
    RunManifest(
        command="rank",
        dataset=dataset,
        task="rank",
        measures=measures,
        alpha=args.alpha,
        inputs={p.name: file_sha256(p) for p in files},
    ).write(args.output)
    return EXIT_OK


def cmd_synth(args) -> int:
    records = synth_generate(args.k, args.m, args.n, args.error_rate, args.separation, args.seed)
    write_predictions(args.output, records)
    RunManifest(
        command="synth",
        dataset=args.dataset,
        model=args.model,
        task="synth",
        run=args.run if args.run is not None else 0,
        seed=args.seed,
        inputs={},
    ).write(args.output)
    return EXIT_OK


def cmd_report(args) -> int:
    if not args.arc and not args.sig:
        raise ValueError("report needs at least one --arc or --sig file")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    hashes = {}

    if args.arc:
        point_lines = ["dataset,model,run,measure,beta,accuracy"]
        summary_lines = ["dataset,model,run,measure,auarc,n_samples"]
        for path in args.arc:
            payload = read_result(path)
            if payload.get("task") != "selective":
                raise DataFormatError(f"{path}: --arc expects selective results")
            base = (payload["dataset"], payload["model"], payload["run"], payload["measure"])
            for beta, acc in zip(payload["betas"], payload["accuracies"]):
                point_lines.append(
                    ",".join(str(v) for v in base) + f",{beta},{acc}"
                )
            summary_lines.append(
                ",".join(str(v) for v in base)
                + f",{payload['auarc']},{payload['n_samples']}"
            )
            hashes[Path(path).name] = file_sha256(path)
        (outdir / "arc_points.csv").write_text("\n".join(point_lines) + "\n")
        (outdir / "auarc.csv").write_text("\n".join(summary_lines) + "\n")

    if args.sig:
        net_lines = ["scope,dataset,model,measure,wins,losses,net"]
        sig_lines = ["scope,dataset,model,first,second,p_value,significant"]
        for path in args.sig:
            payload = read_result(path)
            if payload.get("task") != "rank":
                raise DataFormatError(f"{path}: --sig expects rank tables")
            scope = payload["scope"]
            dataset = payload["dataset"]
            for model, entry in payload["models"].items():
                for measure in payload["measures"]:
                    net_lines.append(
                        f"{scope},{dataset},{model},{measure},"
                        f"{entry['wins'][measure]},{entry['losses'][measure]},{entry['net'][measure]}"
                    )
                for pair in entry["pairs"]:
                    sig_lines.append(
                        f"{scope},{dataset},{model},{pair['first']},{pair['second']},"
                        f"{pair['p_value']},{pair['significant']}"
                    )
            agg = payload["aggregate"]
            for measure in payload["measures"]:
                net_lines.append(
                    f"{scope},{dataset},aggregate,{measure},"
                    f"{agg['wins'][measure]},{agg['losses'][measure]},{agg['net'][measure]}"
                )
            hashes[Path(path).name] = file_sha256(path)
        (outdir / "net_wins.csv").write_text("\n".join(net_lines) + "\n")
        (outdir / "significance.csv").write_text("\n".join(sig_lines) + "\n")

    for name in ("arc_points.csv", "auarc.csv", "net_wins.csv", "significance.csv"):
        target = outdir / name
        if target.exists():
            RunManifest(command="report", task="report", inputs=hashes).write(target)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EnumerationCapError as exc:
        print(f"epiuq: enumeration cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NumericalError as exc:
        print(f"epiuq: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"epiuq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Batch front-end: ingest or simulate data, run the bounds and tests, write reports.

Exit codes: 0 success, 2 ingestion error, 3 numerical or domain error,
4 when every requested test is inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import beta as beta_dist

from . import __version__, report
from .dataio import ingest_csv, whiten
from .eigenbounds import SOURCES, eigen_bounds, epsilon_bound
from .errors import DomainError, IngestionError
from .precision import ROUTES, precision_report
from .stattest import test_all_pairs
from .synth import DISTRIBUTIONS, SyntheticSpec, spawn_seeds, write_csv
from .ustat import FIRST_ORDER_NOTE, cov_of_cov

COMMANDS = ("estimate", "eigen-bounds", "precision-bounds", "test", "simulate", "calibrate")
EXIT_OK, EXIT_INGEST, EXIT_DOMAIN, EXIT_INCONCLUSIVE = 0, 2, 3, 4


@dataclass
class RunConfig:
    """One batch run.  Exactly one of ``input`` and ``synthetic`` is set."""

    input: str | None = None
    synthetic: SyntheticSpec | None = None
    delta: float = 0.05
    source: str = "eigenvalue"
    route: str = "both"
    whiten: bool = False
    out: str = "covbounds-out"
    seed: int = 0
    max_iters: int = 100
    tol: float = 1e-10
    bonferroni: bool = False
    tighten: bool = True
    fisher: bool = False
    dot: bool = False
    svg: bool = False
    distributions: tuple = field(default_factory=lambda: DISTRIBUTIONS)

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if (self.input is None) == (self.synthetic is None):
            raise ValueError("exactly one input source is required: a CSV path or a synthetic spec")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")
        if self.route not in ROUTES:
            raise ValueError(f"route must be one of {ROUTES}")


def _metadata(config: RunConfig, sample) -> dict:
    syn = config.synthetic
    return {
        "n": sample.n,
        "p": sample.p,
        "variables": list(sample.names),
        "delta": config.delta,
        "source": config.source,
        "route": config.route,
        "whitened": config.whiten,
        "seed": config.seed,
        "input": config.input,
        "synthetic": None if syn is None else {k: v for k, v in asdict(syn).items() if k != "m"},
        "notes": [FIRST_ORDER_NOTE],
        "version": __version__,
    }


def load_sample(config: RunConfig):
    if config.input is not None:
        sample = ingest_csv(config.input)
    else:
        sample = config.synthetic.sample()
    return whiten(sample) if config.whiten else sample


def run(config: RunConfig, command: str) -> tuple[dict, int]:
    """Execute ``command`` and write its outputs under ``config.out``.

    Returns the report document and the exit code.
    """
    if command not in COMMANDS or command == "calibrate":
        raise ValueError(f"run() handles {COMMANDS[:-1]}, got {command!r}")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    sample = load_sample(config)
    names = list(sample.names)
    doc = {"schema_version": report.SCHEMA_VERSION, "command": command,
           "metadata": _metadata(config, sample)}
    files: list[Path] = []
    code = EXIT_OK

    if command == "simulate":
        if config.synthetic is None:
            raise ValueError("simulate needs a synthetic spec")
        theta = config.synthetic.precision()
        data_path, theta_path = out / "data.csv", out / "theta.csv"
        write_csv(sample, data_path)
        report.write_matrix_csv(theta_path, theta, names, names)
        doc["synthetic"] = {"theta": report._mat(theta), "data_file": data_path.name,
                            "theta_file": theta_path.name}
        files += [data_path, theta_path]
    else:
        cov = cov_of_cov(sample)
        bound = epsilon_bound(cov, config.delta, config.source)
        doc["covariance"] = report.covariance_section(cov, bound)
        bounds = prec = None
        if command in ("eigen-bounds", "precision-bounds", "test"):
            bounds = eigen_bounds(cov.sigma_hat, bound.epsilon, tighten=config.tighten,
                                  max_iters=config.max_iters, tol=config.tol)
            doc["eigen"] = report.eigen_section(bounds)
        if command in ("precision-bounds", "test"):
            prec = precision_report(cov, config.delta, config.route, bounds=bounds,
                                    source=config.source)
            doc["precision"] = report.precision_section(prec)
        if command == "test":
            tests = test_all_pairs(sample, config.delta, "proposed", config.bonferroni, cov=cov,
                                   source=config.source)
            doc["tests"] = report.tests_section(tests, config.bonferroni)
            if config.fisher:
                fz = test_all_pairs(sample, config.delta, "fisher-z", config.bonferroni, cov=cov)
                doc["fisher_z"] = report.tests_section(fz, config.bonferroni)
            if config.dot:
                dot_path = out / "graph.dot"
                dot_path.write_text(report.dot_graph(tests, names), encoding="utf-8")
                files.append(dot_path)
            if tests.results and tests.all_inconclusive:
                code = EXIT_INCONCLUSIVE
        files += report.write_panels(out, names, bounds, prec)
        if config.svg and (bounds is not None or prec is not None):
            files += report.write_svg_heatmaps(out, names, bounds, prec)

    doc["files"] = sorted(f.name for f in files) + ["report.json"]
    report.validate(doc)
    report.write_json(doc, out / "report.json")
    return doc, code


def clopper_pearson(successes: int, trials: int, confidence: float = 0.95):
    """Exact binomial interval; ``None`` when there are no trials."""
    if trials == 0:
        return None
    a = 1 - confidence
    lo = 0.0 if successes == 0 else float(beta_dist.ppf(a / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(beta_dist.ppf(1 - a / 2, successes + 1, trials - successes))
    return [lo, hi]


def _rate(k, n):
    return k / n if n else None


def calibrate(config: RunConfig, replicates: int, confidence: float = 0.95) -> dict:
    """Empirical FPR on true-zero entries and TPR on non-zero entries.

    Both methods see the same replicates.  One fixed ``Theta`` comes from the
    synthetic spec; each replicate draws fresh data from its own spawned seed.
    """
    spec = config.synthetic
    if spec is None:
        raise ValueError("calibrate needs a synthetic spec with known Theta")
    if replicates < 0:
        raise ValueError("replicates must be non-negative")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    theta = spec.precision()
    iu = np.triu_indices(spec.p, 1)
    is_zero = np.abs(theta[iu]) < 1e-9
    _, root = spawn_seeds(spec.seed, 2)
    dist_seeds = root.spawn(len(config.distributions))

    rows = []
    for dist, dseed in zip(config.distributions, dist_seeds):
        dspec = SyntheticSpec(spec.p, spec.n, dist, spec.seed, spec.c, spec.m)
        tallies = {m: {"fp": 0, "tp": 0, "inc": 0} for m in ("proposed", "fisher-z")}
        for rseed in dseed.spawn(replicates):
            sample = dspec.sample(theta, seed=rseed)
            if config.whiten:
                sample = whiten(sample)
            cov = cov_of_cov(sample)
            for method, t in tallies.items():
                res = test_all_pairs(sample, config.delta, method, config.bonferroni, cov=cov,
                                     source=config.source)
                rej = np.array([bool(r.reject_null) for r in res.results])
                t["inc"] += sum(r.reject_null is None for r in res.results)
                t["fp"] += int(rej[is_zero].sum())
                t["tp"] += int(rej[~is_zero].sum())
        n_null = replicates * int(is_zero.sum())
        n_alt = replicates * int((~is_zero).sum())
        if replicates == 0:
            continue
        for method, t in tallies.items():
            rows.append({
                "distribution": dist, "method": method,
                "null_trials": n_null, "false_positives": t["fp"],
                "fpr": _rate(t["fp"], n_null), "fpr_ci": clopper_pearson(t["fp"], n_null, confidence),
                "alt_trials": n_alt, "true_positives": t["tp"],
                "tpr": _rate(t["tp"], n_alt), "tpr_ci": clopper_pearson(t["tp"], n_alt, confidence),
                "inconclusive": t["inc"],
            })

    doc = {
        "schema_version": report.SCHEMA_VERSION,
        "command": "calibrate",
        "metadata": {
            "p": spec.p, "n": spec.n, "delta": config.delta, "replicates": replicates,
            "distributions": list(config.distributions), "seed": spec.seed,
            "confidence": confidence, "bonferroni": config.bonferroni, "c": spec.c,
            "version": __version__,
        },
        "theta": theta.tolist(),
        "rows": rows,
        "files": ["calibration.csv", "calibration.json"],
    }
    report.validate(doc, "calibration")
    report.write_json(doc, out / "calibration.json")
    cols = ["distribution", "method", "null_trials", "false_positives", "fpr", "fpr_lo", "fpr_hi",
            "alt_trials", "true_positives", "tpr", "tpr_lo", "tpr_hi", "inconclusive"]
    with open(out / "calibration.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for r in rows:
            flat = {k: r[k] for k in cols if k in r}
            for tag in ("fpr", "tpr"):
                ci = r[f"{tag}_ci"] or [None, None]
                flat[f"{tag}_lo"], flat[f"{tag}_hi"] = ci
            w.writerow(flat)
    return doc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covbounds",
        description="Finite-sample bounds on covariance, eigendecomposition and precision estimates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    shared = argparse.ArgumentParser(add_help=False)
    src = shared.add_mutually_exclusive_group()
    src.add_argument("--input", help="CSV file: header of variable names, one observation per row")
    src.add_argument("--synthetic", choices=DISTRIBUTIONS, help="generate data instead of reading a CSV")
    shared.add_argument("--p", type=int, default=5, help="synthetic dimension")
    shared.add_argument("--n", type=int, default=10_000, help="synthetic sample size")
    shared.add_argument("--c", type=float, default=1.0, help="synthetic affinity scale")
    shared.add_argument("--delta", type=float, default=0.05)
    shared.add_argument("--source", choices=SOURCES, default="eigenvalue")
    shared.add_argument("--route", choices=ROUTES, default="both")
    shared.add_argument("--whiten", action="store_true", help="z-score each variable first")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--out", default="covbounds-out", help="output directory")
    shared.add_argument("--max-iters", type=int, default=100)
    shared.add_argument("--tol", type=float, default=1e-10)
    shared.add_argument("--no-tighten", dest="tighten", action="store_false")
    shared.add_argument("--bonferroni", action="store_true")
    shared.add_argument("--fisher", action="store_true", help="also run the Fisher-z baseline")
    shared.add_argument("--dot", action="store_true", help="write graph.dot")
    shared.add_argument("--svg", action="store_true", help="write SVG heatmaps (needs matplotlib)")
    shared.add_argument("--config", help="JSON file of flag defaults (keys use underscores)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[shared])
        if name == "calibrate":
            sp.add_argument("--replicates", type=int, default=100)
            sp.add_argument("--distributions", nargs="+", choices=DISTRIBUTIONS,
                            default=list(DISTRIBUTIONS))
    return parser


def parse_config(argv=None) -> tuple[argparse.Namespace, RunConfig]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        defaults = json.loads(Path(args.config).read_text(encoding="utf-8"))
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    if args.command in ("simulate", "calibrate") and args.input:
        parser.error(f"{args.command} needs --synthetic, not --input")
    if args.input is None and args.synthetic is None:
        if args.command in ("simulate", "calibrate"):
            args.synthetic = "gaussian"
        else:
            parser.error("one of --input or --synthetic is required")
    spec = None
    if args.synthetic is not None:
        spec = SyntheticSpec(args.p, args.n, args.synthetic, args.seed, args.c)
    try:
        config = RunConfig(
            input=args.input, synthetic=spec, delta=args.delta, source=args.source,
            route=args.route, whiten=args.whiten, out=args.out, seed=args.seed,
            max_iters=args.max_iters, tol=args.tol, bonferroni=args.bonferroni,
            tighten=args.tighten, fisher=args.fisher, dot=args.dot, svg=args.svg,
            distributions=tuple(getattr(args, "distributions", DISTRIBUTIONS)))
    except ValueError as exc:
        parser.error(str(exc))
    return args, config


def _fail(config: RunConfig | None, exc: Exception, code: int) -> int:
    doc = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}
    text = json.dumps(doc)
    print(text, file=sys.stderr)
    if config is not None:
        try:
            out = Path(config.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "error.json").write_text(text + "\n", encoding="utf-8")
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args, config = parse_config(argv)
    try:
        if args.command == "calibrate":
            calibrate(config, args.replicates)
            return EXIT_OK
        _, code = run(config, args.command)
        return code
    except IngestionError as exc:
        return _fail(config, exc, EXIT_INGEST)
    except (DomainError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        return _fail(config, exc, EXIT_DOMAIN)


if __name__ == "__main__":
    sys.exit(main())

"""Machine-readable reports: JSON sections, per-panel CSVs, DOT graphs, SVG heatmaps."""
from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .eigenbounds import EigenBounds, PerturbationBound
from .precision import PrecisionReport
from .stattest import PairwiseTests
from .ustat import CovEstimate

SCHEMA_VERSION = "1.0"


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _vec(a):
    return [_num(x) for x in np.asarray(a, dtype=float).ravel()]


def _mat(a):
    return [[_num(x) for x in row] for row in np.asarray(a, dtype=float)]


def _bools(a):
    return [[bool(x) for x in row] for row in np.asarray(a)]


def covariance_section(cov: CovEstimate, bound: PerturbationBound) -> dict:
    return {
        "sigma_hat": _mat(cov.sigma_hat),
        "cov_of_cov": {
            "lambda_max": _num(cov.lambda_max()),
            "trace": _num(cov.trace()),
            "pairs": [list(pair) for pair in cov.pairs],
            "clamped_diagonal_entries": int(cov.clamped),
        },
        "epsilon": {
            "value": _num(bound.epsilon),
            "source": bound.source,
            "delta": bound.delta,
            "spread": _num(bound.spread),
        },
    }


def eigen_section(bounds: EigenBounds) -> dict:
    lam = bounds.eigenvalues
    t = bounds.tightening
    return {
        "epsilon": _num(bounds.epsilon),
        "eigenvalues": {
            "lower": _vec(lam - bounds.epsilon),
            "empirical": _vec(lam),
            "upper": _vec(lam + bounds.epsilon),
        },
        "eigenvectors": {
            "lower": _mat(bounds.lower),
            "empirical": _mat(bounds.eigenvectors),
            "upper": _mat(bounds.upper),
        },
        "eigenvectors_squared": {
            "lower": _mat(bounds.sq_lower),
            "upper": _mat(bounds.sq_upper),
        },
        "sign_known": _bools(bounds.sign_known),
        "minors_spectra": _mat(bounds.minors_spectra) if bounds.p > 1 else [[] for _ in lam],
        "tightening": {
            "applied": t.applied,
            "iterations": t.iterations,
            "converged": t.converged,
            "inconsistent_entries": t.inconsistent,
        },
    }


def precision_section(rep: PrecisionReport) -> dict:
    out = {
        "theta_hat": _mat(rep.theta_hat),
        "delta": rep.delta,
        "epsilon": _num(rep.epsilon),
        "eigen_route": None,
        "l2_route": None,
        "vacuous_reason": rep.vacuous_reason,
        "diagnostics": {k: (_num(v) if isinstance(v, float) else v)
                        for k, v in rep.diagnostics.items()},
    }
    iv = rep.entry_intervals_eigen
    if iv is not None:
        out["eigen_route"] = {
            "lower": _mat(iv.lo),
            "upper": _mat(iv.hi),
            "significant": _bools(iv.excludes_zero()),
            "unbounded_entries": int(iv.unbounded().sum()),
        }
    if rep.l2_threshold is not None:
        l2 = rep.entry_intervals_l2
        out["l2_route"] = {
            "threshold": _num(rep.l2_threshold),
            "lower": _mat(l2.lo),
            "upper": _mat(l2.hi),
        }
    return out


def tests_section(tests: PairwiseTests, bonferroni: bool) -> dict:
    reasons = {r.reason for r in tests.results if r.reason}
    return {
        "method": tests.method,
        "delta": tests.delta,
        "delta_per_test": tests.delta_per_test,
        "bonferroni": bool(bonferroni),
        "inconclusive_reason": next(iter(reasons)) if reasons else None,
        "results": [
            {
                "i": r.entry[0],
                "j": r.entry[1],
                "theta_hat": _num(r.theta_hat_ij),
                "threshold": None if r.threshold is None else _num(r.threshold),
                "reject_null": r.reject_null,
                "p_value": None if r.p_value is None else _num(r.p_value),
            }
            for r in tests.results
        ],
        "edges": [list(e) for e in tests.edges],
    }


def load_schema(name: str = "report") -> dict:
    text = resources.files("covbounds").joinpath(f"schema/{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc: dict, name: str = "report") -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not match the schema."""
    import jsonschema

    jsonschema.validate(doc, load_schema(name))


def write_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def write_matrix_csv(path, matrix, row_labels, col_labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([""] + list(col_labels))
        for label, row in zip(row_labels, np.atleast_2d(matrix)):
            w.writerow([label] + ["" if not math.isfinite(x) else repr(float(x)) for x in row])


def write_panels(out_dir, names, bounds: EigenBounds | None = None,
                 precision: PrecisionReport | None = None) -> list[Path]:
    """One CSV per figure panel (lower / empirical / upper)."""
    out_dir = Path(out_dir)
    written = []
    p = len(names)
    vec_labels = [f"v{k + 1}" for k in range(p)]

    def emit(fname, mat, rows, cols):
        path = out_dir / fname
        write_matrix_csv(path, mat, rows, cols)
        written.append(path)

    if bounds is not None:
        lam = bounds.eigenvalues
        for tag, vals in (("lower", lam - bounds.epsilon), ("empirical", lam),
                          ("upper", lam + bounds.epsilon)):
            emit(f"eigenvalues_{tag}.csv", vals[None, :], ["lambda"], vec_labels)
        for tag, mat in (("lower", bounds.lower), ("empirical", bounds.eigenvectors),
                         ("upper", bounds.upper)):
            emit(f"eigenvectors_{tag}.csv", mat, names, vec_labels)
    if precision is not None:
        emit("precision_empirical.csv", precision.theta_hat, names, names)
        routes = (("eigen", precision.entry_intervals_eigen),
                  ("l2", precision.entry_intervals_l2))
        for route, iv in routes:
            if iv is None:
                continue
            emit(f"precision_{route}_lower.csv", iv.lo, names, names)
            emit(f"precision_{route}_upper.csv", iv.hi, names, names)
    return written


def dot_graph(tests: PairwiseTests, names) -> str:
    """Undirected graph: solid edges reject the null, dashed edges do not."""
    lines = ["graph dependence {", "  node [shape=circle];"]
    for k, name in enumerate(names):
        lines.append(f'  n{k} [label="{name}"];')
    for r in tests.results:
        i, j = r.entry
        if r.reject_null is None:
            style = "dotted"
        else:
            style = "solid" if r.reject_null else "dashed"
        lines.append(f"  n{i} -- n{j} [style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_svg_heatmaps(out_dir, names, bounds=None, precision=None) -> list[Path]:
    """Static lower / empirical / upper heatmaps; needs matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    panels = []
    if bounds is not None:
        lam = bounds.eigenvalues[None, :]
        panels.append(("eigenvalues", [lam - bounds.epsilon, lam, lam + bounds.epsilon]))
        panels.append(("eigenvectors", [bounds.lower, bounds.eigenvectors, bounds.upper]))
    if precision is not None:
        for route, iv in (("eigen", precision.entry_intervals_eigen),
                          ("l2", precision.entry_intervals_l2)):
            if iv is not None:
                panels.append((f"precision_{route}", [iv.lo, precision.theta_hat, iv.hi]))
    written = []
    for title, mats in panels:
        finite = np.concatenate([m[np.isfinite(m)].ravel() for m in mats])
        vmax = float(np.abs(finite).max()) if finite.size else 1.0
        fig, axes = plt.subplots(1, 3, figsize=(10, 3.4))
        for ax, mat, label in zip(axes, mats, ("Lower bound", "Empirical", "Upper bound")):
            im = ax.imshow(np.where(np.isfinite(mat), mat, np.nan), cmap="RdBu_r",
                           vmin=-vmax, vmax=vmax)
            ax.set_title(label)
            ax.set_yticks(range(mat.shape[0]))
            if mat.shape[0] == len(names):
                ax.set_yticklabels(names)
        fig.colorbar(im, ax=axes, shrink=0.8)
        path = out_dir / f"{title}.svg"
        fig.savefig(path, format="svg")
        plt.close(fig)
        written.append(path)
    return written

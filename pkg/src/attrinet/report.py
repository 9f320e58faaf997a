"""Tidy CSV tables, the theory-vs-empirical comparison, and report figures.

Figures use the non-interactive Agg backend and carry no timestamp, so two
runs with the same configuration write identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import HashMismatch, MalformedInput  # noqa: E402
from .model import ModelParams  # noqa: E402

_PNG_META = {"Software": None}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return "nan" if math.isnan(f) else repr(f)
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def tidy_csv(rows: list[dict], columns: list[str]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue().encode("utf-8")


def write_csv(path: Path, rows: list[dict], columns: list[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(tidy_csv(rows, columns))
    return path


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n",
                    encoding="utf-8")
    return path


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


# ---------------------------------------------------------------------------
# statistics and comparison


@dataclass
class Statistic:
    """One empirical quantity; ``theory`` is an inline reference when the theory file lacks it."""

    name: str
    value: float
    stderr: float
    theory: float | None = None
    theory_ref: str | None = None

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in asdict(self).items()}


def theory_statistics(doc: dict) -> dict[str, float]:
    """Flatten the scalar and vector entries of a theory document into ``name[i]`` keys."""
    out: dict[str, float] = {}
    for key in ("eta", "phi_a", "expected_pr", "degree_tail_exponent", "homophily_D", "Psi", "chi", "nu"):
        vals = doc.get(key)
        if vals is None:
            continue
        for i, v in enumerate(vals):
            if v is not None:
                out[f"{key}[{i}]"] = float(v)
    for key in ("lambda_c", "pagerank_tail_exponent"):
        if doc.get(key) is not None:
            out[key] = float(doc[key])
    for scheme, vals in (doc.get("sampling") or {}).items():
        for i, v in enumerate(vals):
            out[f"sampling.{scheme}[{i}]"] = float(v)
    return out


def _doc_hash(doc: dict) -> str:
    if "params" not in doc:
        raise MalformedInput("document carries no parameters")
    h = ModelParams.from_dict(doc["params"]).param_hash()
    if doc.get("param_hash") not in (None, h):
        raise HashMismatch("stored parameter hash does not match the stored parameters")
    return h


def _z(value: float, theory: float, se: float) -> float:
    diff = value - theory
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else math.copysign(math.inf, diff)


def compare(theory_doc: dict, empirical_docs: list[dict]) -> list[dict]:
    """Match every empirical statistic with its theory value.

    A document without a ``statistics`` list is read as a theory document with
    zero standard errors, so a theory file compared with itself gives z = 0.
    """
    h = _doc_hash(theory_doc)
    flat = theory_statistics(theory_doc)
    rows = []
    for doc in empirical_docs:
        if _doc_hash(doc) != h:
            raise HashMismatch("parameter hashes of the theory and empirical files differ")
        if "statistics" in doc:
            stats = [Statistic(**{k: (math.nan if v is None and k in ("value", "stderr") else v) for k, v in s.items()})
                     for s in doc["statistics"]]
        else:
            stats = [Statistic(k, v, 0.0, None, k) for k, v in theory_statistics(doc).items()]
        for s in stats:
            ref = flat.get(s.theory_ref) if s.theory_ref else None
            theo = ref if ref is not None else s.theory
            if theo is None:
                continue
            rows.append({"statistic": s.name, "theory": float(theo), "empirical": float(s.value),
                         "stderr": float(s.stderr), "z": _z(float(s.value), float(theo), float(s.stderr))})
    return rows


COMPARISON_COLUMNS = ["statistic", "theory", "empirical", "stderr", "z"]


# ---------------------------------------------------------------------------
# figures


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_degree_pmf(rows: list[dict], path: Path) -> Path:
    """Empirical per-attribute degree pmf (markers) against the limit law (lines)."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    attrs = sorted({r["attribute"] for r in rows})
    for a in attrs:
        sub = [r for r in rows if r["attribute"] == a and r["empirical"] > 0]
        k = np.array([r["k"] for r in sub])
        ax.loglog(k, [r["empirical"] for r in sub], "o", ms=3, label=f"attribute {a}")
        th = [r for r in rows if r["attribute"] == a and r["theory"] and r["theory"] > 0]
        ax.loglog([r["k"] for r in th], [r["theory"] for r in th], "-", lw=1, color=ax.lines[-1].get_color())
    ax.set_xlabel("degree k")
    ax.set_ylabel("P(deg = k)")
    ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_ccdf(values: np.ndarray, attribute: np.ndarray, path: Path, xlabel: str) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for a in np.unique(attribute):
        x = np.sort(values[attribute == a])[::-1]
        x = x[x > 0]
        if x.size == 0:
            continue
        ax.loglog(x, np.arange(1, x.size + 1) / x.size, lw=1, label=f"attribute {int(a)}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("fraction with score >= x")
    ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_sampling(rows: list[dict], path: Path) -> Path:
    """Attribute frequencies per scheme with two-stderr bars and theory ticks."""
    schemes = list(dict.fromkeys(r["scheme"] for r in rows))
    attrs = sorted({r["attribute"] for r in rows})
    width = 0.8 / max(len(attrs), 1)
    fig, ax = plt.subplots(figsize=(1.2 * len(schemes) + 2.5, 4.0))
    for j, a in enumerate(attrs):
        sub = [next(r for r in rows if r["scheme"] == s and r["attribute"] == a) for s in schemes]
        x = np.arange(len(schemes)) + (j - (len(attrs) - 1) / 2) * width
        ax.bar(x, [r["empirical"] for r in sub], width, yerr=[2 * r["stderr"] for r in sub],
               label=f"attribute {a}", alpha=0.8)
        th = [r["theory"] if r["theory"] is not None else np.nan for r in sub]
        ax.plot(x, th, "k_", ms=12)
    ax.set_xticks(np.arange(len(schemes)))
    ax.set_xticklabels(schemes, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("sampled attribute frequency")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_fringe(rows: list[dict], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    th = np.array([r["theory"] for r in rows])
    em = np.array([r["empirical"] for r in rows])
    ax.loglog(th, em, "o", ms=4)
    lo, hi = min(th.min(), em[em > 0].min()), max(th.max(), em.max())
    ax.plot([lo, hi], [lo, hi], "k--", lw=0.8)
    ax.set_xlabel("limiting fringe probability")
    ax.set_ylabel("empirical fringe proportion")
    fig.tight_layout()
    return _save(fig, path)

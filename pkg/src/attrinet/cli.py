"""Command line entry point and the configuration-driven experiment runner."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import traceback
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .centrality import default_hill_k, normalized_totals, pagerank_exact, tail_exponent_estimate
from .errors import AttrinetError, ConfigError, InsufficientData, ParamError
from .generate import generate_P, generate_U, run_manifest
from .model import Graph, ModelParams, RngStream, read_graph, validate_params, write_graph
from .presets import preset
from .report import (
    COMPARISON_COLUMNS,
    Statistic,
    compare,
    plot_ccdf,
    plot_degree_pmf,
    plot_fringe,
    plot_sampling,
    tidy_csv,
    write_csv,
    write_json,
)
from .sample import NODE_SCHEMES, SUBGRAPH_SCHEMES, SchemeSpec, attribute_representation, empirical_bias
from .stats import census, compare_fringe
from .theory import bias_limit_details, degree_law, rare_minority, sampling_limits, solve

SUITES = ("theory", "generate", "pagerank", "sample", "fringe", "bias", "rare_minority")
DEGREE_KMAX = 20
DEFAULT_SCHEMES = [
    {"kind": "uniform"},
    {"kind": "degree"},
    {"kind": "in_degree"},
    {"kind": "pagerank_walk", "c": 0.85},
    {"kind": "fixed_walk", "M": 5},
]


@dataclass
class ExperimentConfig:
    params: ModelParams | None = None
    n: int = 100_000
    reps: int = 10_000
    c: float = 0.85
    schemes: list[SchemeSpec] = field(default_factory=list)
    alpha: float = 0.01
    p: float = 0.5
    bias_reps: int = 20
    bias_rule: str = "percentile"
    bias_keep_isolated: bool = True
    fringe_cap: int = 3
    seed: int = 0
    outputs: str = "attrinet-out"
    model: str = "P"
    seed_attribute: int = 0
    write_graph: bool = False
    figures: bool = True
    suites: dict[str, Any] = field(default_factory=dict)

    KEYS = ("params", "preset", "n", "reps", "c", "schemes", "alpha", "p", "bias_reps", "bias_rule",
            "bias_keep_isolated", "fringe_cap", "seed", "outputs", "model", "seed_attribute", "write_graph",
            "figures", "suites")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - set(cls.KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "params" in d and "preset" in d:
            raise ConfigError("give either params or preset, not both")
        kw: dict[str, Any] = {k: v for k, v in d.items() if k not in ("params", "preset", "schemes", "suites")}
        if "params" in d:
            kw["params"] = ModelParams.from_dict(d["params"])
        elif "preset" in d:
            kw["params"] = preset(d["preset"])
        kw["schemes"] = [SchemeSpec.from_dict(s) for s in d.get("schemes", DEFAULT_SCHEMES)]
        suites = d.get("suites", {})
        if not isinstance(suites, dict):
            raise ConfigError("suites must be an object")
        bad = set(suites) - set(SUITES)
        if bad:
            raise ConfigError(f"unknown suites: {sorted(bad)}")
        kw["suites"] = suites
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def enabled(self, suite: str) -> bool:
        v = self.suites.get(suite, False)
        return v is not False and v is not None

    def validate(self) -> None:
        needs_params = any(self.enabled(s) for s in SUITES if s != "rare_minority")
        if needs_params and self.params is None:
            raise ConfigError("the selected suites need params or a preset")
        if self.params is not None:
            self.params = validate_params(self.params)
        if int(self.n) < 0 or int(self.reps) < 1 or int(self.bias_reps) < 2:
            raise ConfigError("n must be >= 0, reps >= 1 and bias_reps >= 2")
        if not 0.0 < self.c < 1.0:
            raise ConfigError("damping c must lie in (0, 1)")
        if self.model not in ("P", "U"):
            raise ConfigError("model must be 'P' or 'U'")
        if self.bias_rule not in ("top_k", "percentile"):
            raise ConfigError("bias_rule must be 'top_k' or 'percentile'")
        if self.enabled("sample") and not self.schemes:
            raise ConfigError("the sample suite needs at least one scheme")
        if any(s.kind in SUBGRAPH_SCHEMES for s in self.schemes):
            raise ConfigError("subgraph schemes belong to the bias suite, not to schemes")
        rm = self.suites.get("rare_minority")
        if self.enabled("rare_minority") and (not isinstance(rm, dict) or set(rm) != {"a", "D"}):
            raise ConfigError("rare_minority needs an object with keys a and D")
        for s in SUITES:
            if s != "rare_minority" and not isinstance(self.suites.get(s, False), bool):
                raise ConfigError(f"suite toggle {s!r} must be true or false")

    def to_dict(self) -> dict:
        return {
            "params": None if self.params is None else self.params.to_dict(),
            "n": int(self.n), "reps": int(self.reps), "c": float(self.c),
            "schemes": [s.to_dict() for s in self.schemes],
            "alpha": self.alpha, "p": self.p, "bias_reps": int(self.bias_reps), "bias_rule": self.bias_rule,
            "bias_keep_isolated": bool(self.bias_keep_isolated), "fringe_cap": int(self.fringe_cap),
            "seed": int(self.seed), "outputs": str(self.outputs), "model": self.model,
            "seed_attribute": int(self.seed_attribute), "write_graph": bool(self.write_graph),
            "figures": bool(self.figures), "suites": self.suites,
        }


def load_config(path: str | Path) -> dict:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    return d


def set_threads(n: int | None) -> int:
    """Apply ``--threads`` or ``ATTRINET_THREADS``; the flag wins."""
    import numba

    # numba probes for an optional threading library and warns when it is absent
    warnings.filterwarnings("ignore", message=".*TBB.*")
    if n is None:
        env = os.environ.get("ATTRINET_THREADS")
        n = int(env) if env else None
    if n is None:
        return int(numba.get_num_threads())
    if n < 1:
        raise ConfigError("thread count must be positive")
    n = min(int(n), int(numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


# ---------------------------------------------------------------------------
# experiment runner


class _Run:
    def __init__(self, cfg: ExperimentConfig, threads: int):
        self.cfg = cfg
        self.out = Path(cfg.outputs)
        self.threads = threads
        self.status: dict[str, dict] = {}
        self.files: list[str] = []
        self.stats: list[Statistic] = []
        self._sol = None
        self._graph: Graph | None = None

    # lazily built shared objects
    @property
    def sol(self):
        if self._sol is None:
            walk = next((s.M for s in self.cfg.schemes if s.kind == "fixed_walk"), None)
            self._sol = solve(self.cfg.params, c=self.cfg.c, walk_len=walk)
        return self._sol

    @property
    def graph(self) -> Graph:
        if self._graph is None:
            cfg = self.cfg
            gen = generate_U if cfg.model == "U" else generate_P
            self._graph = gen(cfg.params, cfg.n, rng=RngStream(cfg.seed, 1), seed_attrs=cfg.seed_attribute)
        return self._graph

    def _path(self, name: str) -> Path:
        self.files.append(name)
        return self.out / name

    def suite(self, name: str, fn) -> None:
        try:
            fn()
            self.status[name] = {"status": "ok"}
        except AttrinetError as exc:
            self.status[name] = {"status": "error", "error": exc.code, "message": str(exc)}
        except Exception as exc:  # surfaced with the suite name, never swallowed silently
            self.status[name] = {"status": "error", "error": type(exc).__name__, "message": str(exc),
                                 "traceback": traceback.format_exc(limit=5)}

    # -- suites
    def theory(self) -> None:
        write_json(self._path("theory.json"), self.sol.to_dict())

    def generate(self) -> None:
        cfg, g = self.cfg, self.graph
        if cfg.write_graph:
            write_graph(g, self.out / "graph")
            self.files += ["graph/vertices.csv", "graph/edges.csv"]
        cen = census(g, K=cfg.params.K)
        write_json(self._path("census.json"), cen.to_dict())
        rows = []
        for a in range(cfg.params.K):
            pmf = cen.degree_pmf(a, DEGREE_KMAX)
            law = None
            try:
                law = degree_law(a, self.sol, cfg.params)
            except AttrinetError:
                pass
            n_a = int(cen.attr_counts[a])
            for k in range(1, DEGREE_KMAX + 1):
                th = float(law.pmf(np.array([k]))[0]) if law is not None else None
                rows.append({"attribute": a, "k": k, "count": int(cen.degree_hist[a, k]) if k < cen.degree_hist.shape[1] else 0,
                             "empirical": float(pmf[k]), "theory": th})
                if th is not None and n_a and k <= 10:
                    self.stats.append(Statistic(f"degree_pmf[{a},{k}]", float(pmf[k]),
                                                math.sqrt(th * (1.0 - th) / n_a), th))
            deg = g.degree[g.attribute == a]
            try:
                est = tail_exponent_estimate(deg, default_hill_k(len(deg)))
                self.stats.append(Statistic(f"degree_hill[{a}]", est.exponent, est.ci_halfwidth / 1.96, None,
                                            f"degree_tail_exponent[{a}]"))
            except InsufficientData:
                pass
        write_csv(self._path("degree_pmf.csv"), rows, ["attribute", "k", "count", "empirical", "theory"])
        if cfg.figures:
            plot_degree_pmf(rows, self._path("figures/degree_pmf.png"))

    def pagerank(self) -> None:
        cfg, g = self.cfg, self.graph
        sc = pagerank_exact(g, cfg.c)
        if cfg.write_graph:
            (self.out / "graph").mkdir(parents=True, exist_ok=True)
            self._path("graph/pagerank.csv").write_bytes(sc.to_csv(g))
        tot = normalized_totals(sc, g)
        r = sc.r
        summary: dict[str, Any] = {"c": cfg.c, "total": tot["total"], "per_attribute": tot["per_attribute"], "hill": {}}
        for a in range(cfg.params.K):
            ra = r[g.attribute == a]
            if len(ra) > 1:
                self.stats.append(Statistic(f"mean_pagerank[{a}]", float(ra.mean()),
                                            float(ra.std(ddof=1) / math.sqrt(len(ra))), None, f"expected_pr[{a}]"))
            try:
                est = tail_exponent_estimate(ra, default_hill_k(len(ra)))
            except InsufficientData:
                continue
            summary["hill"][str(a)] = {"exponent": est.exponent, "ci": list(est.ci), "k": est.k}
            self.stats.append(Statistic(f"pagerank_hill[{a}]", est.exponent, est.ci_halfwidth / 1.96, None,
                                        "pagerank_tail_exponent"))
        write_json(self._path("pagerank_summary.json"), summary)
        if cfg.figures:
            plot_ccdf(r, g.attribute, self._path("figures/pagerank_ccdf.png"), "normalized Page-rank R")

    def sample(self) -> None:
        cfg, g = self.cfg, self.graph
        rows, reports = [], []
        for i, s in enumerate(cfg.schemes):
            theo = None
            if cfg.params.is_tree and cfg.params.gamma == 1 and s.theory_key is not None:
                lim = sampling_limits(self.sol, cfg.params, s.c if s.c is not None else cfg.c, s.M)
                theo = lim[s.theory_key]
            rep = attribute_representation(g, s, cfg.reps, RngStream(cfg.seed, (2, i)), K=cfg.params.K, theory=theo)
            reports.append(rep.to_dict())
            ref_ok = s.kind not in ("pagerank_walk", "fixed_walk") or (
                (s.kind == "pagerank_walk" and s.c == cfg.c) or (s.kind == "fixed_walk" and s.M == self.sol_walk))
            for a in range(cfg.params.K):
                th = None if theo is None else float(theo[a])
                se = math.sqrt(th * (1.0 - th) / cfg.reps) if th is not None else float(rep.stderr[a])
                rows.append({"scheme": s.label(), "attribute": a, "empirical": float(rep.attr_freq[a]),
                             "stderr": float(rep.stderr[a]), "theory": th})
                if th is not None:
                    ref = f"sampling.{s.theory_key}[{a}]" if ref_ok else None
                    self.stats.append(Statistic(f"sample.{s.label()}[{a}]", float(rep.attr_freq[a]), se, th, ref))
        write_json(self._path("samples.json"), reports)
        write_csv(self._path("samples.csv"), rows, ["scheme", "attribute", "empirical", "stderr", "theory"])
        if cfg.figures:
            plot_sampling(rows, self._path("figures/sampling.png"))

    @property
    def sol_walk(self):
        return next((s.M for s in self.cfg.schemes if s.kind == "fixed_walk"), None)

    def fringe(self) -> None:
        cfg = self.cfg
        cen = census(self.graph, fringe_cap=cfg.fringe_cap, K=cfg.params.K)
        table = compare_fringe(cen, self.sol, cfg.params)
        rows = [{"tree": r.tree, "count": r.count, "empirical": r.empirical, "theory": r.theory, "z": r.z}
                for r in table]
        N = cen.n_vertices
        for r in table:
            self.stats.append(Statistic(f"fringe.{r.tree}", r.empirical, math.sqrt(r.theory * (1 - r.theory) / N),
                                        r.theory))
        write_csv(self._path("fringe.csv"), rows, ["tree", "count", "empirical", "theory", "z"])
        if cfg.figures and rows:
            plot_fringe(rows, self._path("figures/fringe.png"))

    def bias(self) -> None:
        cfg = self.cfg
        det = bias_limit_details(cfg.params, cfg.p, cfg.alpha)
        out: dict[str, Any] = {"theory": det, "p": cfg.p, "alpha": cfg.alpha, "n": cfg.n, "reps": cfg.bias_reps,
                               "rule": cfg.bias_rule, "keep_isolated": cfg.bias_keep_isolated, "empirical": {}}
        rows = []
        vals: dict[str, list[float]] = {k: [] for k in SUBGRAPH_SCHEMES}
        for rep in range(cfg.bias_reps):
            g = generate_P(cfg.params, cfg.n, rng=RngStream(cfg.seed, (3, rep)), seed_attrs=cfg.seed_attribute)
            for j, kind in enumerate(SUBGRAPH_SCHEMES):
                b = empirical_bias(g, SchemeSpec(kind, p=cfg.p), cfg.alpha, RngStream(cfg.seed, (4, rep, j)),
                                   rule=cfg.bias_rule, keep_isolated=cfg.bias_keep_isolated)
                vals[kind].append(b)
                rows.append({"scheme": kind, "replication": rep, "bias": b})
        for kind, v in vals.items():
            v = np.asarray(v)
            se = float(v.std(ddof=1) / math.sqrt(len(v)))
            out["empirical"][kind] = {"mean": float(v.mean()), "stderr": se}
            self.stats.append(Statistic(f"bias.{kind}", float(v.mean()), se, float(det["bias"])))
        write_json(self._path("bias.json"), out)
        write_csv(self._path("bias.csv"), rows, ["scheme", "replication", "bias"])

    def rare_minority(self) -> None:
        rm = self.cfg.suites["rare_minority"]
        res = rare_minority(float(rm["a"]), float(rm["D"]), c=self.cfg.c)
        write_json(self._path("rare_minority.json"), res)

    # -- driver
    def execute(self) -> int:
        self.out.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        self._manifest(t0, final=False)
        for name in SUITES:
            if self.cfg.enabled(name):
                self.suite(name, getattr(self, name))
        if self.stats:
            self.suite("compare", self._compare)
        self._manifest(t0, final=True)
        return 1 if any(s["status"] == "error" for s in self.status.values()) else 0

    def _compare(self) -> None:
        doc = self.sol.to_dict()
        emp = {"params": self.cfg.params.to_dict(), "param_hash": self.cfg.params.param_hash(),
               "statistics": [s.to_dict() for s in self.stats]}
        write_json(self._path("empirical.json"), emp)
        rows = compare(doc, [emp])
        write_csv(self._path("comparison.csv"), rows, COMPARISON_COLUMNS)

    def _manifest(self, t0: float, final: bool) -> None:
        cfg = self.cfg
        extra = {"config": cfg.to_dict(), "suites": self.status, "files": sorted(set(self.files)),
                 "threads": self.threads, "version": __version__, "complete": final}
        if cfg.params is not None:
            man = run_manifest(cfg.params, RngStream(cfg.seed, 0), cfg.n, time.perf_counter() - t0, **extra)
        else:
            man = {"params": None, "param_hash": None, "seed": {"master_seed": cfg.seed},
                   "wall_time_s": time.perf_counter() - t0, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                   **extra}
        write_json(self.out / "manifest.json", man)


def run_experiment(config: ExperimentConfig | dict, threads: int | None = None) -> tuple[int, dict]:
    """Run every enabled suite; returns the exit code and the per-suite status."""
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    run = _Run(cfg, set_threads(threads))
    code = run.execute()
    return code, run.status


# ---------------------------------------------------------------------------
# argument parsing


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="PATH", default=d, help="JSON experiment/parameter document")
    p.add_argument("--seed", type=int, metavar="U64", default=d, help="64-bit master seed")
    p.add_argument("--out", metavar="DIR", default=d, help="output directory (stdout when omitted)")
    p.add_argument("--threads", type=int, metavar="N", default=d, help="numba threads (overrides ATTRINET_THREADS)")


def _params_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help="named parameter set: ba, symmetric, asymmetric, three_type")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="attrinet", description="Attributed preferential-attachment networks.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(ap, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", parents=[common], help="solve every closed-form limit")
    _params_flags(p)
    p.add_argument("-c", type=float, default=None, help="damping factor")
    p.add_argument("--walk-len", type=int, default=None)

    p = sub.add_parser("generate", parents=[common], help="grow one graph and write its CSVs")
    _params_flags(p)
    p.add_argument("-n", type=int, default=None)
    p.add_argument("--model", choices=("P", "U"), default=None)
    p.add_argument("--seed-attribute", type=int, default=None)

    p = sub.add_parser("pagerank", parents=[common], help="exact Page-rank of a stored graph")
    p.add_argument("graph", help="directory holding vertices.csv and edges.csv")
    p.add_argument("-c", type=float, default=0.85)

    p = sub.add_parser("sample", parents=[common], help="attribute frequencies under a sampling scheme")
    p.add_argument("graph")
    p.add_argument("--scheme", required=True, choices=NODE_SCHEMES)
    p.add_argument("-c", type=float, default=None)
    p.add_argument("-M", type=int, default=None)
    p.add_argument("--reps", type=int, default=10_000)

    p = sub.add_parser("census", parents=[common], help="degree, homophily and fringe census of a stored graph")
    p.add_argument("graph")
    p.add_argument("--fringe-cap", type=int, default=0)

    p = sub.add_parser("bias", parents=[common], help="theoretical and simulated top-percentile bias")
    _params_flags(p)
    p.add_argument("-p", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("-n", type=int, default=None)
    p.add_argument("--reps", type=int, default=0, help="simulation replications (0: theory only)")
    p.add_argument("--rule", choices=("top_k", "percentile"), default=None)

    p = sub.add_parser("rare-minority", parents=[common], help="exact and asymptotic rare-minority sampling laws")
    p.add_argument("-a", type=float, required=True)
    p.add_argument("-D", type=float, required=True)
    p.add_argument("-c", type=float, default=0.85)
    p.add_argument("--walk-len", type=int, default=None)

    sub.add_parser("run", parents=[common], help="run a full experiment config")

    p = sub.add_parser("compare", parents=[common], help="compare a theory file with empirical files")
    p.add_argument("theory_json")
    p.add_argument("empirical_json", nargs="+")
    return ap


def _emit(args, name: str, payload: bytes) -> None:
    if args.out:
        path = Path(args.out) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))


def _json_bytes(obj) -> bytes:
    from .report import _json_default

    return (json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n").encode("utf-8")


def _config_from_args(args) -> dict:
    d = load_config(args.config) if args.config else {}
    if getattr(args, "preset", None):
        d.pop("params", None)
        d["preset"] = args.preset
    if args.seed is not None:
        d["seed"] = args.seed
    if args.out is not None:
        d["outputs"] = args.out
    return d


def _params_from(d: dict) -> ModelParams:
    if "params" in d:
        return validate_params(ModelParams.from_dict(d["params"]))
    if "preset" in d:
        return preset(d["preset"])
    raise ConfigError("parameters needed: pass --preset or a --config with params")


def _load_graph(path: str) -> Graph:
    man = Path(path) / "manifest.json"
    seed_size = None
    if man.exists():
        seed_size = json.loads(man.read_text(encoding="utf-8")).get("seed_size")
    return read_graph(path, seed_size)


def _cmd_theory(args, d):
    walk = args.walk_len
    sol = solve(_params_from(d), c=args.c if args.c is not None else d.get("c", 0.85), walk_len=walk)
    _emit(args, "theory.json", _json_bytes(sol.to_dict()))


def _cmd_generate(args, d):
    if not args.out:
        raise ConfigError("generate needs --out")
    params = _params_from(d)
    n = args.n if args.n is not None else d.get("n", 100_000)
    model = args.model or d.get("model", "P")
    seed = d.get("seed", 0)
    gen = generate_U if model == "U" else generate_P
    t0 = time.perf_counter()
    seed_attr = args.seed_attribute if args.seed_attribute is not None else d.get("seed_attribute", 0)
    g = gen(params, n, rng=RngStream(seed, 1), seed_attrs=seed_attr)
    wall = time.perf_counter() - t0
    write_graph(g, args.out)
    from .generate import write_manifest

    write_manifest(Path(args.out) / "manifest.json",
                   run_manifest(params, RngStream(seed, 1), n, wall, model=model, seed_size=g.seed_size))


def _cmd_pagerank(args, d):
    g = _load_graph(args.graph)
    sc = pagerank_exact(g, args.c)
    _emit(args, "pagerank.csv", sc.to_csv(g))


def _cmd_sample(args, d):
    g = _load_graph(args.graph)
    s = SchemeSpec(args.scheme, c=args.c, M=args.M)
    rep = attribute_representation(g, s, args.reps, RngStream(d.get("seed", 0), 2))
    _emit(args, "sample.json", rep.to_json().encode("utf-8") + b"\n")


def _cmd_census(args, d):
    cen = census(_load_graph(args.graph), fringe_cap=args.fringe_cap)
    _emit(args, "census.json", cen.to_json().encode("utf-8") + b"\n")


def _cmd_bias(args, d):
    params = _params_from(d)
    p = args.p if args.p is not None else d.get("p", 0.5)
    alpha = args.alpha if args.alpha is not None else d.get("alpha", 0.01)
    out: dict[str, Any] = {"theory": bias_limit_details(params, p, alpha)}
    if args.reps:
        if args.reps < 2:
            raise ParamError("need at least two replications")
        n = args.n if args.n is not None else d.get("n", 100_000)
        rule = args.rule or d.get("bias_rule", "percentile")
        keep = d.get("bias_keep_isolated", True)
        seed = d.get("seed", 0)
        for j, kind in enumerate(SUBGRAPH_SCHEMES):
            v = []
            for rep in range(args.reps):
                g = generate_P(params, n, rng=RngStream(seed, (3, rep)))
                v.append(empirical_bias(g, SchemeSpec(kind, p=p), alpha, RngStream(seed, (4, rep, j)),
                                        rule=rule, keep_isolated=keep))
            v = np.asarray(v)
            out[kind] = {"mean": float(v.mean()), "stderr": float(v.std(ddof=1) / math.sqrt(len(v)))}
    _emit(args, "bias.json", _json_bytes(out))


def _cmd_rare(args, d):
    res = rare_minority(args.a, args.D, c=args.c, walk_len=args.walk_len)
    _emit(args, "rare_minority.json", _json_bytes(res))


def _cmd_compare(args, d):
    def load(p):
        try:
            return json.loads(Path(p).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {p}: {exc}") from None

    rows = compare(load(args.theory_json), [load(p) for p in args.empirical_json])
    _emit(args, "comparison.csv", tidy_csv(rows, COMPARISON_COLUMNS))


def _cmd_run(args, d):
    if not args.config:
        raise ConfigError("run needs --config")
    code, status = run_experiment(ExperimentConfig.from_dict(d), threads=args.threads)
    for name, st in status.items():
        line = f"{name}: {st['status']}"
        if st["status"] == "error":
            line += f" ({st['error']}: {st['message']})"
        print(line, file=sys.stderr)
    return code


COMMANDS = {
    "theory": _cmd_theory,
    "generate": _cmd_generate,
    "pagerank": _cmd_pagerank,
    "sample": _cmd_sample,
    "census": _cmd_census,
    "bias": _cmd_bias,
    "rare-minority": _cmd_rare,
    "run": _cmd_run,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command != "run":
            set_threads(args.threads)
        d = _config_from_args(args) if args.command != "compare" else {}
        code = COMMANDS[args.command](args, d)
    except AttrinetError as exc:
        print(f"attrinet {args.command}: {exc.code}: {exc}", file=sys.stderr)
        return 1
    return int(code or 0)


if __name__ == "__main__":
    sys.exit(main())

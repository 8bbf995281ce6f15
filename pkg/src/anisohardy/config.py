"""Experiment configuration: YAML loading, defaults, validation and hashing."""

from __future__ import annotations

import copy
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .distance import KINDS as DOMAIN_KINDS
from .errors import AnisoHardyError, ConfigError
from .gauge import FAMILIES, gauge_from_record
from .quadrature import Resolution
from .report import config_hash
from .sharpness import DEFAULT_ALPHAS, TARGETS, SharpnessProbe, critical_exponent

SUITES = ("identities", "subcritical", "critical", "geometric", "weighted", "uncertainty",
          "sharpness", "transform")
SUITE_CHOICES = SUITES + ("all",)

DEFAULTS = {
    "suite": "all",
    "seed": 0,
    "gauge": {"family": "euclidean"},
    "domains": [{"kind": "wulff-ball", "R": 1.0}, {"kind": "half-space"},
                {"kind": "cube", "side": 2.0}],
    "params": {
        "N": [2, 3],
        "p": [1.0, 1.5, 2.0, 4.0],
        "R": 1.0,
        "lambdas": [0.25, 0.5, 2.0, 4.0],
        "weighted_alphas": [-1.0, 0.0, 1.5],
        "bridge_pairs": [[3, 2], [4, 2], [4, 3], [5, 3]],
        "alphas": {k: list(v) for k, v in DEFAULT_ALPHAS.items()},
        "sharpness": {"subcritical": {"N": 3, "p": 2.0}, "critical": {"N": 2},
                      "halfspace": {"N": 2, "p": 2.0}},
        "final_gap": {"subcritical": 0.02, "critical": 0.03, "halfspace": 0.03},
    },
    "resolution": {},
    "output": {"dir": "anisohardy-out", "csv": "results.csv", "plots": False},
}

# fields that do not change any computed number
_COSMETIC = ("output",)

_RESOLUTION_FIELDS = {f.name for f in dataclasses.fields(Resolution)}


class _Locator:
    """Maps key paths of a YAML document to their line numbers."""

    def __init__(self, text=None, source="<config>"):
        self.source = source
        self.lines = {}
        if text:
            try:
                node = yaml.compose(text)
            except yaml.YAMLError:
                node = None
            if node is not None:
                self._walk(node, ())

    def _walk(self, node, path):
        self.lines.setdefault(path, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = path + (str(k.value),)
                self.lines[key] = k.start_mark.line + 1
                self._walk(v, key)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                self._walk(v, path + (i,))

    def error(self, path, message):
        dotted = ".".join(str(p) for p in path) or "<root>"
        probe = tuple(path)
        while probe and probe not in self.lines:
            probe = probe[:-1]
        where = f"{self.source}:{self.lines[probe]}: " if probe in self.lines else f"{self.source}: "
        return ConfigError(f"{where}{dotted}: {message}")


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _check_keys(mapping, allowed, path, loc):
    if not isinstance(mapping, dict):
        raise loc.error(path, f"expected a mapping, got {type(mapping).__name__}")
    for k in mapping:
        if k not in allowed:
            raise loc.error(path + (k,), f"unknown key; allowed: {', '.join(sorted(allowed))}")


def _num_list(value, path, loc, cast=float, allow_scalar=True):
    if allow_scalar and not isinstance(value, (list, tuple)):
        value = [value]
    if not isinstance(value, (list, tuple)) or not value:
        raise loc.error(path, "expected a non-empty list of numbers")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise loc.error(path + (i,), f"expected a number, got {v!r}")
        if cast is int and int(v) != v:
            raise loc.error(path + (i,), f"expected an integer, got {v!r}")
        if not math.isfinite(v):
            raise loc.error(path + (i,), "must be finite")
        out.append(cast(v))
    return out


def _number(value, path, loc, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise loc.error(path, f"expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise loc.error(path, f"must be positive, got {value!r}")
    return float(value)


@dataclass
class ExperimentConfig:
    """A validated experiment description.

    Build with `load_config` or `config_from_mapping`; every cross-parameter
    rule is checked there, so a constructed config is runnable.
    """

    suite: str
    seed: int
    gauge: dict
    domains: list
    N: tuple
    p: tuple
    R: float
    lambdas: tuple
    weighted_alphas: tuple
    bridge_pairs: tuple
    alphas: dict
    sharpness: dict
    final_gap: dict
    resolution: Resolution
    out_dir: str
    csv_name: str
    plots: bool
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def suites(self):
        return SUITES if self.suite == "all" else (self.suite,)

    def semantic(self):
        """The fields that influence computed numbers, with canonical types."""
        return {k: v for k, v in self.raw.items() if k not in _COSMETIC}

    @property
    def hash(self):
        return config_hash(self.semantic())

    def gauge_for(self, dim):
        return gauge_from_record({**self.gauge, "dimension": dim})

    @property
    def csv_path(self):
        return Path(self.out_dir) / self.csv_name


def _canonical(value):
    """Numbers as floats (ints stay ints when integral-typed keys need them)."""
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return float(value)
    return value


def _validate_gauge(rec, dims, loc):
    path = ("gauge",)
    _check_keys(rec, {"family", "dimension", "q", "weights", "matrix", "diag"}, path, loc)
    fam = rec.get("family", "euclidean")
    if fam not in FAMILIES or fam == "custom":
        allowed = ", ".join(f for f in FAMILIES if f != "custom")
        raise loc.error(path + ("family",), f"unknown or non-configurable family {fam!r}; use {allowed}")
    if "dimension" in rec:
        d = rec["dimension"]
        bad = [n for n in dims if n != d]
        if bad:
            raise loc.error(path + ("dimension",),
                            f"gauge pinned to dimension {d} but the run needs dimension(s) {sorted(set(bad))}; "
                            "remove gauge.dimension or restrict params.N and params.sharpness")
    for d in sorted(set(dims)):
        try:
            gauge_from_record({k: v for k, v in rec.items() if k != "dimension"}, dim=d)
        except AnisoHardyError as exc:
            raise loc.error(path, f"cannot build the gauge in dimension {d}: {exc}; the run needs "
                                  f"dimensions {sorted(set(dims))} (params.N, params.sharpness "
                                  "and params.bridge_pairs)") from None
        except (TypeError, ValueError) as exc:
            raise loc.error(path, f"malformed gauge record: {exc}") from None


def _validate_domains(recs, dims, loc):
    if isinstance(recs, dict):
        recs = [recs]
    if not isinstance(recs, list) or not recs:
        raise loc.error(("domains",), "expected a domain record or a non-empty list of them")
    out = []
    for i, rec in enumerate(recs):
        path = ("domains", i)
        _check_keys(rec, {"kind", "R", "side", "halfspaces"}, path, loc)
        kind = rec.get("kind", "wulff-ball")
        if kind not in DOMAIN_KINDS:
            raise loc.error(path + ("kind",), f"unknown domain kind {kind!r}; use {', '.join(DOMAIN_KINDS)}")
        if "R" in rec:
            _number(rec["R"], path + ("R",), loc, positive=True)
        if "side" in rec:
            _number(rec["side"], path + ("side",), loc, positive=True)
        if kind == "polytope":
            hs = rec.get("halfspaces")
            try:
                arr = np.asarray(hs, dtype=float)
            except (TypeError, ValueError):
                arr = None
            if arr is None or arr.ndim != 2 or arr.shape[0] < 1:
                raise loc.error(path + ("halfspaces",), "expected a list of [a_1, ..., a_N, b] rows")
            bad = [n for n in dims if arr.shape[1] != n + 1]
            if bad:
                raise loc.error(path + ("halfspaces",),
                                f"rows have {arr.shape[1]} entries but dimension(s) {sorted(set(bad))} "
                                f"need N + 1; restrict params.N")
        out.append(dict(rec, kind=kind))
    return out


def _sharpness_targets(params, loc):
    path = ("params", "sharpness")
    sh = params["sharpness"]
    _check_keys(sh, set(TARGETS), path, loc)
    out = {}
    for t in TARGETS:
        rec = sh.get(t, {})
        _check_keys(rec, {"N", "p"}, path + (t,), loc)
        N = int(_num_list(rec.get("N", 2), path + (t, "N"), loc, int)[0])
        p = _number(rec.get("p", N if t == "critical" else 2.0), path + (t, "p"), loc, positive=True)
        if N < 2:
            raise loc.error(path + (t, "N"), "dimension must be >= 2")
        if t == "critical" and p != N:
            raise loc.error(path + (t, "p"), f"the critical probe needs p = N = {N}")
        if t == "subcritical" and (p <= 1 or p >= N):
            raise loc.error(path + (t, "p"), f"the subcritical probe needs 1 < p < N = {N}, got {p:g}")
        if t == "halfspace" and p <= 1:
            raise loc.error(path + (t, "p"), f"the half-space probe needs p > 1, got {p:g}")
        out[t] = {"N": N, "p": p}
    return out


def _sharpness_alphas(params, gauge_rec, out, loc):
    _check_keys(params["alphas"], set(TARGETS), ("params", "alphas"), loc)
    _check_keys(params["final_gap"], set(TARGETS), ("params", "final_gap"), loc)
    alphas = {}
    for t in TARGETS:
        apath = ("params", "alphas", t)
        a = tuple(_num_list(params["alphas"].get(t, list(DEFAULT_ALPHAS[t])), apath, loc))
        try:
            g = gauge_from_record({k: v for k, v in gauge_rec.items() if k != "dimension"},
                                  dim=out[t]["N"])
            SharpnessProbe(t, g, a, p=out[t]["p"], N=out[t]["N"], R=params["R"])
        except AnisoHardyError as exc:
            ac = critical_exponent(t, out[t]["p"], out[t]["N"])
            raise loc.error(apath, f"{exc}; the critical exponent for {t} with N={out[t]['N']}, "
                                   f"p={out[t]['p']:g} is {ac:g}") from None
        alphas[t] = a
    gaps = {t: _number(params["final_gap"].get(t, DEFAULTS["params"]["final_gap"][t]),
                       ("params", "final_gap", t), loc, positive=True) for t in TARGETS}
    return alphas, gaps


def config_from_mapping(data, overrides=None, source="<config>", text=None):
    """Validate a parsed configuration mapping and fill in defaults.

    `overrides` (from command-line flags) take precedence over `data`.
    Raises `ConfigError` naming the offending field and, when the YAML
    source text is available, its line.
    """
    loc = _Locator(text, source)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise loc.error((), "top level must be a mapping")
    _check_keys(data, set(DEFAULTS), (), loc)
    for k in ("params", "output", "resolution", "gauge"):
        if k in data and not isinstance(data[k], dict):
            raise loc.error((k,), "expected a mapping")
    if "params" in data:
        _check_keys(data["params"], set(DEFAULTS["params"]), ("params",), loc)
    if "output" in data:
        _check_keys(data["output"], set(DEFAULTS["output"]), ("output",), loc)
    # the gauge record replaces the default rather than merging into it
    cfg = _merge(DEFAULTS, {k: v for k, v in data.items() if k != "gauge"})
    if "gauge" in data:
        cfg["gauge"] = copy.deepcopy(data["gauge"])
    for k, v in (overrides or {}).items():
        if v is None:
            continue
        if k in ("dir", "plots", "csv"):
            cfg["output"][k] = v
        else:
            cfg[k] = v

    suite = cfg["suite"]
    if suite not in SUITE_CHOICES:
        raise loc.error(("suite",), f"unknown suite {suite!r}; choose from {', '.join(SUITE_CHOICES)}")
    seed = cfg["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise loc.error(("seed",), f"seed must be a nonnegative integer, got {seed!r}")

    params = cfg["params"]
    Ns = tuple(_num_list(params["N"], ("params", "N"), loc, int))
    if any(n < 2 for n in Ns):
        raise loc.error(("params", "N"), "dimensions must be >= 2")
    ps = tuple(_num_list(params["p"], ("params", "p"), loc))
    if any(p < 1 for p in ps):
        raise loc.error(("params", "p"), "exponents must be >= 1")
    R = _number(params["R"], ("params", "R"), loc, positive=True)
    params["R"] = R
    lambdas = tuple(_num_list(params["lambdas"], ("params", "lambdas"), loc))
    if any(l <= 0 for l in lambdas):
        raise loc.error(("params", "lambdas"), "scaling factors must be positive")
    walphas = tuple(_num_list(params["weighted_alphas"], ("params", "weighted_alphas"), loc))
    for a in walphas:
        # C = N - 1 for rho = H0, and C + alpha > -1 is required
        bad = [n for n in Ns if not (n - 1) + a > -1]
        if bad:
            raise loc.error(("params", "weighted_alphas"),
                            f"alpha = {a:g} violates C + alpha > -1 (C = N - 1) for N in {bad}; "
                            f"use alpha > {-min(bad):g}")
    pairs = params["bridge_pairs"]
    if not isinstance(pairs, list) or not pairs:
        raise loc.error(("params", "bridge_pairs"), "expected a list of [m, N] pairs")
    bridge = []
    for i, pr in enumerate(pairs):
        vals = _num_list(pr, ("params", "bridge_pairs", i), loc, int, allow_scalar=False)
        if len(vals) != 2 or not vals[1] >= 2 or not vals[0] > vals[1]:
            raise loc.error(("params", "bridge_pairs", i), f"need [m, N] with m > N >= 2, got {pr!r}")
        bridge.append(tuple(vals))

    sharp = _sharpness_targets(params, loc)
    dims = set(Ns) | {s["N"] for s in sharp.values()} | {n for pr in bridge for n in pr[1:]}
    _validate_gauge(cfg["gauge"], dims, loc)
    alphas, gaps = _sharpness_alphas(params, cfg["gauge"], sharp, loc)
    domains = _validate_domains(cfg["domains"], dims, loc)

    rrec = cfg["resolution"]
    _check_keys(rrec, _RESOLUTION_FIELDS, ("resolution",), loc)
    try:
        res = Resolution(**rrec)
        if not (isinstance(res.n_per_panel, int) and res.n_per_panel >= 2):
            raise ValueError("n_per_panel must be an integer >= 2")
        if not 0 < res.grading < 1:
            raise ValueError("grading must lie in (0, 1)")
    except (TypeError, ValueError) as exc:
        raise loc.error(("resolution",), str(exc)) from None

    out = cfg["output"]
    if not isinstance(out["plots"], bool):
        raise loc.error(("output", "plots"), "expected true or false")

    raw = _canonical({
        "suite": suite, "seed": seed, "gauge": cfg["gauge"], "domains": domains,
        "params": {"N": Ns, "p": ps, "R": R, "lambdas": lambdas, "weighted_alphas": walphas,
                   "bridge_pairs": bridge, "alphas": alphas, "sharpness": sharp,
                   "final_gap": gaps},
        "resolution": dataclasses.asdict(res),
        "output": {"dir": str(out["dir"]), "csv": str(out["csv"]), "plots": out["plots"]},
    })
    # integral fields keep integer form so the gauge builder and YAML dump stay clean
    raw["seed"] = seed
    return ExperimentConfig(
        suite=suite, seed=seed, gauge=dict(cfg["gauge"]), domains=domains, N=Ns, p=ps, R=R,
        lambdas=lambdas, weighted_alphas=walphas, bridge_pairs=tuple(bridge), alphas=alphas,
        sharpness=sharp, final_gap=gaps, resolution=res, out_dir=str(out["dir"]),
        csv_name=str(out["csv"]), plots=bool(out["plots"]), raw=raw)


def load_config(path, overrides=None):
    """Read and validate a YAML configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else str(path)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"{where}: YAML syntax error: {problem}") from None
    return config_from_mapping(data, overrides, source=str(path), text=text)


def default_config(**overrides):
    return config_from_mapping({}, overrides)

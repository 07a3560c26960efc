"""Scenario runner: validated configs in, immutable index reports out.

A config is a JSON object with ``schema: 1``, a ``kind`` and per-kind
``params``; a sweep is ``{"schema": 1, "sweep": [config, ...]}``. Each run
writes ``<id>-<hash>.json`` and appends a row to ``summary.csv`` in the output
directory. Existing files are never overwritten.

Exit codes: 0 agreement, 1 configuration error, 2 computational error,
3 disagreement (or failed selftest criteria).
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__
from .algebra.groups import cyclic, reflection
from .algebra.io import element_from_json
from .analytic.circle import assemble_circle
from .analytic.index import numerical_index
from .analytic.line import line_index
from .analytic.schemes import CircleFourier, LineGrid
from .errors import ConfigError, NCIndexError
from .rieffel import build_rieffel, connes_index, unit_projection
from .suite import REFLECTION_PROJECTIONS, character_projection, d_phi_operator, elliptic_suite
from .symbols.formulas import euler_index_finite, winding_index
from .symbols.io import operator_from_json
from .symbols.operators import principal_symbol
from .symbols.twisting import assemble_twisted_circle

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_DISAGREE = 0, 1, 2, 3
METHODS = ("topological", "analytic")
TIMING_KEYS = ("timings", "created")
_WRITE_LOCK = threading.Lock()


def load_schema() -> dict:
    text = resources.files("ncindex").joinpath("schemas/config.schema.json").read_text()
    return json.loads(text)


def validate(config: dict) -> None:
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    body = {k: v for k, v in config.items() if k != "out"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


# -- float formatting ------------------------------------------------------


def _prepare(obj, table: list):
    """Replace floats by placeholders so they can be printed with 17 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            return repr(obj)
        table.append(f"{obj:.16e}")
        return f"\x00{len(table) - 1}\x00"
    if isinstance(obj, dict):
        return {str(k): _prepare(v, table) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v, table) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "item"):
        return _prepare(obj.item(), table)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with every float in ``%.16e`` form; non-finite floats become strings."""
    table: list[str] = []
    text = json.dumps(_prepare(obj, table), indent=2, sort_keys=True)
    for i, v in enumerate(table):
        text = text.replace(f'"\\u0000{i}\\u0000"', v, 1)
    return text


# -- reports ---------------------------------------------------------------


@dataclass
class IndexReport:
    scenario: str
    config_hash: str
    kind: str
    config: dict
    contributions: list = field(default_factory=list)
    topological: dict | None = None
    analytic: dict | None = None
    agreement: bool | None = None
    residuals: dict = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    version: str = __version__

    def as_dict(self) -> dict:
        return {"schema": 1, "scenario": self.scenario, "config_hash": self.config_hash, "kind": self.kind,
                "config": self.config, "contributions": self.contributions, "topological": self.topological,
                "analytic": self.analytic, "agreement": self.agreement, "residuals": self.residuals,
                "truncation": self.truncation, "timings": self.timings, "extra": self.extra,
                "version": self.version}

    @property
    def exit_code(self) -> int:
        return EXIT_DISAGREE if self.agreement is False else EXIT_OK


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k not in TIMING_KEYS}


def _analytic_dict(res) -> dict:
    return res.as_dict() | {"certified": res.certified}


def _agreement(topo: dict | None, ana: dict | None) -> bool | None:
    if topo is None or ana is None:
        return None
    return Fraction(topo["snapped"]) == ana["index"]


# -- scenario kinds --------------------------------------------------------


def _torus(cfg: dict, methods, rep: IndexReport) -> None:
    p = cfg["params"]
    theta = p["theta"]
    N = p.get("N", 256)
    grid = LineGrid(p.get("q", 64), float(p.get("L", 26.0)), p=p.get("p", 8))
    t0 = time.perf_counter()
    if p.get("projection", "rieffel") == "unit":
        P = unit_projection(theta)
        Pline = P
    else:
        P = build_rieffel(theta, p.get("eps"), N, profile=p.get("profile", "exp"))
        Pline = P
        rep.residuals.update({"idempotency": P.idempotency_residual, "trace": P.trace_residual})
        rep.extra.update({"beta": P.beta, "eps": P.eps, "trace": P.trace})
    rep.timings["build"] = time.perf_counter() - t0
    rep.truncation.update({"N": N, "q": grid.q, "L": grid.L, "p": grid.p})
    if "topological" in methods:
        t0 = time.perf_counter()
        c = connes_index(P)
        rep.topological = {"value": c.value, "snapped": str(c.snapped), "residual": c.residual}
        rep.contributions = [{"class": "e", "raw": c.value, "snapped": str(c.snapped), "flagged": False}]
        rep.timings["topological"] = time.perf_counter() - t0
    if "analytic" in methods:
        t0 = time.perf_counter()
        res, _, tail = line_index(Pline, grid)
        rep.analytic = _analytic_dict(res)
        rep.residuals["boundary_tail"] = tail
        rep.timings["analytic"] = time.perf_counter() - t0


def _resolve_operator(desc, base: Path | None):
    if isinstance(desc, dict):
        return operator_from_json(desc)
    if desc.startswith("suite:"):
        name = desc.split(":", 1)[1]
        for s in elliptic_suite():
            if s.name == name:
                return s.op
        raise ConfigError(f"no suite operator named {name!r}")
    path = Path(desc)
    if not path.is_absolute() and base is not None:
        path = base / path
    try:
        return operator_from_json(json.loads(path.read_text()))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read operator file {path}: {exc}") from exc


def _circle(cfg: dict, methods, rep: IndexReport, base: Path | None) -> None:
    p = cfg["params"]
    op = _resolve_operator(p["operator"], base)
    N = p.get("N", 64)
    rep.truncation.update({"N": N, "B": op.bandwidth, "coefficient_N": op.N})
    if "topological" in methods:
        t0 = time.perf_counter()
        w = winding_index(principal_symbol(op))
        rep.topological = {"value": w.value, "snapped": str(w.snapped), "residual": w.residual}
        rep.contributions = [{"class": "e", "raw": w.value, "snapped": str(w.snapped), "flagged": False}]
        rep.timings["topological"] = time.perf_counter() - t0
    if "analytic" in methods:
        t0 = time.perf_counter()
        res = numerical_index(assemble_circle(op, CircleFourier(N, op.bandwidth)))
        rep.analytic = _analytic_dict(res)
        rep.timings["analytic"] = time.perf_counter() - t0


def _euler(G, P, N: int, methods, rep: IndexReport) -> None:
    rep.truncation["N"] = N
    if "topological" in methods:
        t0 = time.perf_counter()
        eu = euler_index_finite(P)
        rep.contributions = [{"class": list(c.representative), "raw": c.raw, "snapped": str(c.snapped),
                              "flagged": c.flagged} for c in eu.contributions]
        rep.topological = {"value": eu.total, "snapped": str(eu.total_snapped),
                           "residual": abs(eu.total - float(eu.total_snapped))}
        rep.timings["topological"] = time.perf_counter() - t0
    if "analytic" in methods:
        t0 = time.perf_counter()
        D = assemble_twisted_circle(d_phi_operator(G), P, CircleFourier(N, 0), "functions", "one-forms")
        rep.analytic = _analytic_dict(numerical_index(D))
        rep.timings["analytic"] = time.perf_counter() - t0


def _reflection(cfg: dict, methods, rep: IndexReport) -> None:
    p = cfg.get("params", {})
    G = reflection()
    name = p.get("projection", "even")
    P = character_projection(G, REFLECTION_PROJECTIONS[name]) if name != "identity" else \
        character_projection(G, 0) + character_projection(G, 1)
    _euler(G, P, p.get("N", 128), methods, rep)


def _euler_general(cfg: dict, methods, rep: IndexReport) -> None:
    p = cfg["params"]
    g = p["group"]
    L = float(g.get("L", 6.283185307179586))
    if g["kind"] == "reflection":
        G = reflection(L)
    else:
        if "order" not in g:
            raise ConfigError("cyclic groups need an order")
        G = cyclic(g["order"], L)
    proj = p["projection"]
    if "character" in proj:
        P = character_projection(G, proj["character"])
    else:
        try:
            P = element_from_json(proj)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad projection: {exc}") from exc
        if P.group != G:
            raise ConfigError("projection lives over a different group")
    _euler(G, P, p.get("N", 128), methods, rep)


def _selftest(cfg: dict, rep: IndexReport) -> None:
    from .acceptance import run_all
    results = run_all(cfg.get("params", {}).get("criteria"))
    rep.extra["criteria"] = [{"number": r.number, "title": r.title, "passed": r.passed, "error": r.error,
                              "metrics": r.metrics} for r in results]
    rep.timings["criteria"] = {str(r.number): r.seconds for r in results}
    rep.agreement = all(r.passed for r in results)


# -- driver ----------------------------------------------------------------


def execute(config: dict, base: Path | None = None) -> IndexReport:
    """Validate and compute one scenario without touching the filesystem."""
    validate(config)
    h = config_hash(config)
    kind = config["kind"]
    sid = config.get("id", kind)
    methods = tuple(config.get("methods", METHODS))
    rep = IndexReport(sid, h, kind, {k: v for k, v in config.items() if k != "out"})
    t0 = time.perf_counter()
    if kind == "torus":
        _torus(config, methods, rep)
    elif kind == "circle-winding":
        _circle(config, methods, rep, base)
    elif kind == "reflection-euler":
        _reflection(config, methods, rep)
    elif kind == "euler-general":
        _euler_general(config, methods, rep)
    else:
        _selftest(config, rep)
    if kind != "selftest":
        rep.agreement = _agreement(rep.topological, rep.analytic)
    rep.timings["total"] = time.perf_counter() - t0
    return rep


CSV_FIELDS = ["scenario", "config_hash", "kind", "topological", "analytic", "agreement", "gap_ratio",
              "total_seconds", "report"]


def write_report(rep: IndexReport, out: Path) -> Path:
    """Write the report and append a summary row; never overwrites an existing file."""
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{rep.scenario}-{rep.config_hash[:12]}"
    body = rep.as_dict()
    with _WRITE_LOCK:
        for existing in sorted(out.glob(f"*-{rep.config_hash[:12]}*.json")):
            try:
                old = json.loads(existing.read_text())
            except (OSError, json.JSONDecodeError):
                continue
            if old.get("config_hash") != rep.config_hash or old.get("config") != json.loads(dumps(rep.config)):
                raise ConfigError(f"hash prefix collision with {existing.name} for a different config")
        path = out / f"{stem}.json"
        n = 1
        while path.exists():
            path = out / f"{stem}.{n}.json"
            n += 1
        path.write_text(dumps(body) + "\n")
        summary = out / "summary.csv"
        new = not summary.exists()
        with summary.open("a", newline="") as fh:
            w = csv.writer(fh)
            if new:
                w.writerow(CSV_FIELDS)
            gap = rep.analytic["gap_ratio"] if rep.analytic else ""
            w.writerow([rep.scenario, rep.config_hash, rep.kind,
                        rep.topological["snapped"] if rep.topological else "",
                        rep.analytic["index"] if rep.analytic else "",
                        "" if rep.agreement is None else str(rep.agreement).lower(),
                        f"{gap:.16e}" if isinstance(gap, float) else gap,
                        f"{rep.timings.get('total', 0.0):.16e}", path.name])
    return path


def run(config: dict, out: str | Path | None = None, base: Path | None = None) -> IndexReport:
    """Compute a scenario and persist it; errors propagate before anything is written."""
    rep = execute(config, base)
    target = Path(out or config.get("out") or "ncindex-reports")
    rep.extra["path"] = str(write_report(rep, target))
    return rep


def thread_count() -> int:
    try:
        n = int(os.environ.get("NCINDEX_THREADS", "1"))
    except ValueError as exc:
        raise ConfigError("NCINDEX_THREADS must be an integer") from exc
    return max(1, n)


def run_sweep(configs: list[dict], out: str | Path | None = None, base: Path | None = None) -> list:
    """Run scenarios with up to ``NCINDEX_THREADS`` workers; results keep the input order.

    Each entry is an ``IndexReport`` or the exception raised for that scenario.
    """
    def one(cfg):
        try:
            return run(cfg, out, base)
        except (NCIndexError, ArithmeticError, ValueError) as exc:
            return exc

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        return list(pool.map(one, configs))


def exit_code_for(result) -> int:
    if isinstance(result, ConfigError):
        return EXIT_CONFIG
    if isinstance(result, Exception):
        return EXIT_COMPUTE
    return result.exit_code


def load_config(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def split_sweep(config: dict) -> list[dict] | None:
    if not isinstance(config, dict) or "sweep" not in config:
        return None
    extra = set(config) - {"schema", "sweep", "out"}
    if config.get("schema") != 1 or extra or not isinstance(config["sweep"], list):
        raise ConfigError("a sweep is {\"schema\": 1, \"sweep\": [...], \"out\"?}")
    return config["sweep"]

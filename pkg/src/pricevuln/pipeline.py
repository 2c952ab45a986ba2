"""End-to-end pipeline: ingest, cluster, price, disguise, zones, economics, system load.

Each stage reads what earlier stages wrote to the output directory and
records sha256 checksums in ``manifest.json``. ``run`` chains the stages
through the same files, so staged and monolithic runs emit identical reports.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
import tempfile
import time
from functools import wraps
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import reports
from .clustering import ClusterConfig, ClusterModel, fit
from .config import ConfigError, RunConfig
from .disguise import compute_all, rebuild_records, trajectories
from .economics import UtilityParams, benefit_curves, benefits, utility_gain
from .pricing import PriceCurve, PriceCurveError, load_price_curve, price_clusters, synthetic_curve
from .profiles import Dataset, IngestError, ingest_csv
from .sysload import peak_sweep
from .zones import sweep

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"

# the nine analysis reports, in stage order (rejected.csv is the ingestion log)
REPORTS = (
    "centers.csv",
    "assignments.csv",
    "cluster_prices.csv",
    "cr.csv",
    "trajectories.csv",
    "zones.csv",
    "benefits.csv",
    "benefit_curve.csv",
    "sysload.csv",
)


class StageError(RuntimeError):
    """A pipeline failure tagged with the stage it happened in.

    ``exit_code`` is 1 for bad or missing inputs and 2 for failures inside
    the computation.
    """

    def __init__(self, stage: str, message: str, exit_code: int = 2):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.exit_code = exit_code


_INPUT_ERRORS = (IngestError, PriceCurveError, reports.ReportError, ConfigError, OSError)


def _stage(name: str):
    def deco(fn: Callable[..., Any]):
        @wraps(fn)
        def wrapper(cfg: RunConfig, out: str | Path | None = None):
            out = Path(out if out is not None else cfg.output_dir)
            t0 = time.perf_counter()
            try:
                result = fn(cfg, out)
            except StageError:
                raise
            except _INPUT_ERRORS as exc:
                raise StageError(name, str(exc), 1) from exc
            except Exception as exc:
                raise StageError(name, f"{type(exc).__name__}: {exc}", 2) from exc
            m = _manifest(out)
            m["timings"][name] = round(time.perf_counter() - t0, 6)
            _save(out, m)
            log.info("stage %s done in %.2fs", name, m["timings"][name])
            return result

        wrapper.stage_name = name
        return wrapper

    return deco


def sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _fresh_manifest() -> dict:
    return {"config": {}, "inputs": {}, "counts": {}, "files": {}, "timings": {}}


def _manifest(out: Path) -> dict:
    p = out / MANIFEST
    if p.exists():
        return json.loads(p.read_text(encoding="utf-8"))
    return _fresh_manifest()


def _save(out: Path, m: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / MANIFEST).write_text(json.dumps(m, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require(out: Path, m: dict, name: str, stage: str) -> Path:
    p = out / name
    if not p.exists():
        raise StageError(stage, f"missing {name}", 1)
    want = m["files"].get(name)
    if want is not None and sha256(p) != want:
        raise StageError(stage, f"checksum mismatch for {name} (file changed since it was written)", 1)
    return p


def _emit(out: Path, m: dict, name: str, writer: Callable[[Path], None]) -> None:
    p = out / name
    writer(p)
    m["files"][name] = sha256(p)


def _profiles(cfg: RunConfig, m: dict, stage: str) -> Dataset:
    if not cfg.profiles_path:
        raise StageError(stage, "no profiles file configured", 1)
    path = Path(cfg.profiles_path)
    if not path.exists():
        raise StageError(stage, f"profiles file not found: {path}", 1)
    digest = sha256(path)
    known = m["inputs"].get("profiles")
    if known is not None and known != digest:
        raise StageError(stage, "profiles file differs from the one used to cluster", 1)
    m["inputs"]["profiles"] = digest
    data = ingest_csv(path, cfg.H)
    if len(data) == 0:
        raise StageError(stage, "no valid profiles", 1)
    return data


def price_curve(cfg: RunConfig) -> PriceCurve:
    if cfg.synthetic_prices and not cfg.prices_path:
        return synthetic_curve(cfg.H)
    if not cfg.prices_path:
        raise StageError("pricing", "no prices file configured (use --prices or --synthetic-prices)", 1)
    if not Path(cfg.prices_path).exists():
        raise StageError("pricing", f"prices file not found: {cfg.prices_path}", 1)
    return load_price_curve(cfg.prices_path, cfg.H)


def _model(out: Path, m: dict, data: Dataset, cfg: RunConfig, stage: str) -> ClusterModel:
    centers, sizes = reports.read_centers(_require(out, m, "centers.csv", stage), cfg.H)
    ids, assignment = reports.read_assignments(_require(out, m, "assignments.csv", stage))
    if ids != data.ids:
        raise StageError(stage, "assignments.csv does not match the profiles file", 1)
    if assignment.size and (assignment.min() < 0 or assignment.max() >= len(centers)):
        raise StageError(stage, "assignments.csv refers to unknown clusters", 1)
    return ClusterModel(centers, assignment, sizes, float("nan"), 0)


def _records(out: Path, m: dict, data: Dataset, model: ClusterModel, stage: str):
    ids, homes, crs, targets = reports.read_cr(_require(out, m, "cr.csv", stage))
    if ids != data.ids:
        raise StageError(stage, "cr.csv does not match the profiles file", 1)
    return rebuild_records(data.weights, ids, model.centers, homes, crs, targets)


@_stage("cluster")
def stage_cluster(cfg: RunConfig, out: Path) -> ClusterModel:
    # clustering starts a new lineage; later stages are checked against it
    m = _fresh_manifest()
    m["config"] = cfg.echo()
    data = _profiles(cfg, m, "cluster")
    if cfg.k > len(data):
        raise StageError("cluster", f"k={cfg.k} exceeds the {len(data)} valid profiles", 1)
    model = fit(data, cfg.k, ClusterConfig(cfg.seed, cfg.max_iters, cfg.tol, cfg.center_update))
    out.mkdir(parents=True, exist_ok=True)
    _emit(out, m, "rejected.csv", lambda p: reports.write_rejected(p, data.rejected))
    _emit(out, m, "centers.csv", lambda p: reports.write_centers(p, model))
    _emit(out, m, "assignments.csv", lambda p: reports.write_assignments(p, data.ids, model.assignment))
    m["counts"].update(
        rows=len(data) + len(data.rejected),
        profiles=len(data),
        rejected=len(data.rejected),
        k=model.k,
        iterations=model.iterations,
    )
    _save(out, m)
    return model


@_stage("pricing")
def stage_price(cfg: RunConfig, out: Path):
    m = _manifest(out)
    curve = price_curve(cfg)
    centers, sizes = reports.read_centers(_require(out, m, "centers.csv", "pricing"), cfg.H)
    prices = price_clusters(ClusterModel(centers, np.zeros(0, int), sizes, float("nan"), 0), curve)
    if cfg.prices_path:
        m["inputs"]["prices"] = sha256(cfg.prices_path)
    else:
        m["inputs"]["prices"] = "synthetic"
    _emit(out, m, "cluster_prices.csv", lambda p: reports.write_cluster_prices(p, prices))
    _save(out, m)
    return prices


@_stage("disguise")
def stage_disguise(cfg: RunConfig, out: Path):
    m = _manifest(out)
    data = _profiles(cfg, m, "disguise")
    model = _model(out, m, data, cfg, "disguise")
    prices = reports.read_cluster_prices(_require(out, m, "cluster_prices.csv", "disguise"))
    if len(prices) != model.k:
        raise StageError("disguise", "cluster_prices.csv and centers.csv disagree on k", 1)
    records = compute_all(data, model, prices, cfg.switch_rule, cfg.n_threads())
    table = [(th, trajectories(records, th)) for th in cfg.grid().points()]
    _emit(out, m, "cr.csv", lambda p: reports.write_cr(p, records))
    _emit(out, m, "trajectories.csv", lambda p: reports.write_trajectories(p, table))
    m["counts"]["finite_cr"] = sum(1 for r in records if r.finite)
    _save(out, m)
    return records


@_stage("zones")
def stage_zones(cfg: RunConfig, out: Path):
    m = _manifest(out)
    data = _profiles(cfg, m, "zones")
    model = _model(out, m, data, cfg, "zones")
    records = _records(out, m, data, model, "zones")
    rows = sweep(records, data, model, cfg.grid())
    _emit(out, m, "zones.csv", lambda p: reports.write_zones(p, rows))
    _save(out, m)
    return rows


@_stage("economics")
def stage_economics(cfg: RunConfig, out: Path):
    m = _manifest(out)
    data = _profiles(cfg, m, "economics")
    model = _model(out, m, data, cfg, "economics")
    prices = reports.read_cluster_prices(_require(out, m, "cluster_prices.csv", "economics"))
    records = _records(out, m, data, model, "economics")
    basis = cfg.benefit_basis
    _emit(out, m, "benefits.csv",
          lambda p: reports.write_benefits(p, benefits(records, data.profiles, prices, basis)))
    curve = benefit_curves(records, data.profiles, prices, cfg.grid(), basis)
    _emit(out, m, "benefit_curve.csv", lambda p: reports.write_benefit_curve(p, curve))
    if cfg.utility is not None:
        params = UtilityParams(float(cfg.utility.get("u_max", 0.0)), float(cfg.utility.get("c", 0.0)))
        gains = [(r.profile_id, utility_gain(r, prof, prices, params))
                 for r, prof in zip(records, data.profiles) if r.finite]
        _emit(out, m, "utility.csv", lambda p: reports.write_utility(p, gains))
    _save(out, m)
    return curve


@_stage("sysload")
def stage_sysload(cfg: RunConfig, out: Path):
    m = _manifest(out)
    data = _profiles(cfg, m, "sysload")
    model = _model(out, m, data, cfg, "sysload")
    records = _records(out, m, data, model, "sysload")
    rows = peak_sweep(data, records, cfg.grid(), cfg.disguise_extent, model.centers)
    _emit(out, m, "sysload.csv", lambda p: reports.write_sysload(p, rows))
    _save(out, m)
    return rows


STAGES = (stage_cluster, stage_price, stage_disguise, stage_zones, stage_economics, stage_sysload)


def run(cfg: RunConfig) -> dict:
    """Run every stage; outputs land in ``cfg.output_dir`` only if all of them succeed.

    Returns the manifest (config echo, counts, checksums, timings).
    """
    if not cfg.profiles_path or not Path(cfg.profiles_path).exists():
        raise StageError("profiles", f"profiles file not found: {cfg.profiles_path}", 1)
    price_curve(cfg)  # fail early, naming the pricing stage
    out = Path(cfg.output_dir)
    parent = out.resolve().parent
    parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".pricevuln-", dir=parent))
    try:
        for stage in STAGES:
            stage(cfg, tmp)
        out.mkdir(parents=True, exist_ok=True)
        for p in sorted(tmp.iterdir()):
            os.replace(p, out / p.name)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return _manifest(out)

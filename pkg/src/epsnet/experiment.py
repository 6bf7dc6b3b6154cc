"""Sweep harness: (instance x eps x method x seed) -> CSV rows plus a
JSON summary.

Rows are computed in parallel (EPSNET_THREADS caps the pool) but always
written in configuration order, so output bytes are a pure function of
the config. Wall times are opt-in because they would break that.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import (
    CapExceededError,
    InstanceError,
    PRNG_ALGORITHM,
    RangeSpace,
    format_rational,
    parse_rational,
)
from .complexity import (
    alexander_capacity,
    capacity_levels,
    capacity_vector,
    doubling_constant,
    vc_dimension,
)
from .nets import (
    cal_net,
    capacity_size_bound,
    doubling_net,
    doubling_net_small_d,
    doubling_size_bound,
    greedy_net,
    iid_net,
    min_net_exact,
    small_doubling_size_bound,
    stratified_net,
    stratified_size_bound,
)

CSV_COLUMNS = [
    "instance",
    "eps",
    "method",
    "seed",
    "size",
    "is_net",
    "draws",
    "d",
    "d_exact",
    "tau",
    "tau_vec_hash",
    "D_value",
    "D_mode",
    "min_net",
    "bound_stratified",
    "bound_capacity",
    "bound_doubling",
    "bound_doubling_small",
    "wall_ms",
]

METHODS = (
    "iid",
    "iid-capacity",
    "stratified",
    "doubling",
    "doubling-small",
    "cal",
    "greedy",
    "exact",
)

METHOD_BOUND_COLUMN = {
    "stratified": "bound_stratified",
    "doubling": "bound_doubling",
    "doubling-small": "bound_doubling_small",
    "iid": "bound_capacity",
    "iid-capacity": "bound_capacity",
}


@dataclass
class ExperimentConfig:
    instances: list
    eps_grid: list
    methods: list
    seeds: list
    C: float = 8.0
    delta: Fraction = Fraction(1, 10)
    cal_budget: int = 20
    oracle_cap: int = 2000
    vc_cap: int = 24
    doubling_range_cap: int = 400
    base_dir: Path = field(default_factory=Path)

    @staticmethod
    def from_dict(doc: dict, base_dir: Path | str = ".") -> "ExperimentConfig":
        required = ("instances", "eps", "methods", "seeds")
        for key in required:
            if key not in doc:
                raise InstanceError(f"experiment config missing '{key}'")
        for m in doc["methods"]:
            if m not in METHODS:
                raise InstanceError(f"unknown method '{m}'")
        return ExperimentConfig(
            instances=list(doc["instances"]),
            eps_grid=[parse_rational(str(e)) for e in doc["eps"]],
            methods=list(doc["methods"]),
            seeds=[int(s) for s in doc["seeds"]],
            C=float(doc.get("C", 8.0)),
            delta=parse_rational(str(doc.get("delta", "1/10"))),
            cal_budget=int(doc.get("cal_budget", 20)),
            oracle_cap=int(doc.get("oracle_cap", 2000)),
            vc_cap=int(doc.get("vc_cap", 24)),
            doubling_range_cap=int(doc.get("doubling_range_cap", 400)),
            base_dir=Path(base_dir),
        )


def load_instance(path: Path | str) -> RangeSpace:
    with open(path, "r", encoding="utf-8") as fh:
        return RangeSpace.from_dict(json.load(fh))


def resolve_instances(config: ExperimentConfig) -> list[RangeSpace]:
    spaces = []
    for entry in config.instances:
        if isinstance(entry, str):
            spaces.append(load_instance(config.base_dir / entry))
        elif "path" in entry:
            spaces.append(load_instance(config.base_dir / entry["path"]))
        elif "inline" in entry:
            spaces.append(RangeSpace.from_dict(entry["inline"]))
        else:
            raise InstanceError(f"instance entry needs 'path' or 'inline': {entry}")
    return spaces


def tau_vector_hash(taus) -> str:
    text = ",".join(format_rational(t) for t in taus)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _fmt_float(x: float) -> str:
    return f"{x:.6f}"


def instance_profile(space: RangeSpace, eps: Fraction, config: ExperimentConfig) -> dict:
    """Shared per-(instance, eps) facts for every row of the sweep."""
    try:
        d_res = vc_dimension(space, cap=config.vc_cap)
    except CapExceededError:
        d_res = vc_dimension(space, mode="lower_bound")
    tau = alexander_capacity(space, eps)
    taus = [tau] + capacity_vector(space, eps)
    D = doubling_constant(
        space, eps,
        d=d_res.value if d_res.exact else None,
        range_cap=config.doubling_range_cap,
    )
    try:
        min_net = str(min_net_exact(space, eps, cap=config.oracle_cap).size)
    except CapExceededError:
        min_net = ""
    d = d_res.value
    D_num = float(D.lower) if D.mode == "exact" else D.upper
    return {
        "d": d,
        "d_exact": d_res.exact,
        "tau": tau,
        "taus": taus,
        "tau_vec_hash": tau_vector_hash(taus[1:]),
        "D_value": D.lower if D.mode == "exact" else D.upper,
        "D_mode": D.mode,
        "D_num": max(D_num, 1.0),
        "min_net": min_net,
        "bound_stratified": stratified_size_bound(d, taus),
        "bound_capacity": capacity_size_bound(d, tau, eps),
        "bound_doubling": doubling_size_bound(d, taus, max(D_num, 1.0)),
        "bound_doubling_small": small_doubling_size_bound(d, max(D_num, 1.0), eps),
    }


def run_method(
    space: RangeSpace,
    eps: Fraction,
    method: str,
    seed: int,
    config: ExperimentConfig,
    profile: dict,
):
    d = profile["d"]
    if method == "iid":
        return iid_net(space, eps, config.delta, "vc", config.C, seed, d=d)
    if method == "iid-capacity":
        return iid_net(space, eps, config.delta, "capacity", config.C, seed, d=d)
    if method == "stratified":
        return stratified_net(space, eps, config.C, seed, d=d)
    if method == "doubling":
        return doubling_net(space, eps, config.C, seed, D=profile["D_num"], d=d)
    if method == "doubling-small":
        return doubling_net_small_d(
            space, eps, config.C, seed, D=profile["D_num"], d=d
        )
    if method == "cal":
        return cal_net(space, eps, config.cal_budget, seed)
    if method == "greedy":
        return greedy_net(space, eps)
    if method == "exact":
        return min_net_exact(space, eps, cap=config.oracle_cap)
    raise InstanceError(f"unknown method '{method}'")


def run_experiment(config: ExperimentConfig, timings: bool = False) -> tuple[list[dict], dict]:
    spaces = resolve_instances(config)
    profiles = {}
    for space in spaces:
        for eps in config.eps_grid:
            profiles[(space.name, eps)] = instance_profile(space, eps, config)

    jobs = [
        (space, eps, method, seed)
        for space in spaces
        for eps in config.eps_grid
        for method in config.methods
        for seed in config.seeds
    ]

    def one(job):
        space, eps, method, seed = job
        profile = profiles[(space.name, eps)]
        row = {
            "instance": space.name,
            "eps": format_rational(eps),
            "method": method,
            "seed": str(seed),
            "d": str(profile["d"]),
            "d_exact": "true" if profile["d_exact"] else "false",
            "tau": format_rational(profile["tau"]),
            "tau_vec_hash": profile["tau_vec_hash"],
            "D_value": (
                str(profile["D_value"])
                if profile["D_mode"] == "exact"
                else _fmt_float(profile["D_value"])
            ),
            "D_mode": profile["D_mode"],
            "min_net": profile["min_net"],
            "bound_stratified": _fmt_float(profile["bound_stratified"]),
            "bound_capacity": _fmt_float(profile["bound_capacity"]),
            "bound_doubling": _fmt_float(profile["bound_doubling"]),
            "bound_doubling_small": _fmt_float(profile["bound_doubling_small"]),
            "wall_ms": "",
        }
        start = time.perf_counter()
        try:
            report = run_method(space, eps, method, seed, config, profile)
            row["size"] = str(report.size)
            row["is_net"] = "true" if report.is_net else "false"
            row["draws"] = str(report.stats.get("draws", 0))
        except Exception as exc:  # recorded in-row, sweep never aborts
            row["size"] = ""
            row["is_net"] = f"error:{type(exc).__name__}"
            row["draws"] = ""
        if timings:
            row["wall_ms"] = str(int((time.perf_counter() - start) * 1000))
        return row

    workers = os.environ.get("EPSNET_THREADS")
    max_workers = max(int(workers), 1) if workers else min(8, os.cpu_count() or 1)
    if max_workers == 1 or len(jobs) <= 1:
        rows = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(one, jobs))

    summary: dict = {
        "schema": 1,
        "prng": PRNG_ALGORITHM,
        "rows": len(rows),
        "methods": {},
    }
    for method in config.methods:
        sub = [r for r in rows if r["method"] == method]
        nets = [r for r in sub if r["is_net"] == "true"]
        errors = [r for r in sub if r["is_net"].startswith("error:")]
        entry = {
            "runs": len(sub),
            "nets": len(nets),
            "errors": len(errors),
            "success_rate": round(len(nets) / len(sub), 6) if sub else None,
        }
        sizes = [int(r["size"]) for r in sub if r["size"]]
        if sizes:
            entry["mean_size"] = round(sum(sizes) / len(sizes), 6)
        bound_col = METHOD_BOUND_COLUMN.get(method)
        if bound_col and nets:
            ratios = [
                int(r["size"]) / float(r[bound_col])
                for r in nets
                if float(r[bound_col]) > 0
            ]
            if ratios:
                entry["mean_size_over_bound"] = round(
                    sum(ratios) / len(ratios), 6
                )
                entry["max_size_over_bound"] = round(max(ratios), 6)
        summary["methods"][method] = entry
    return rows, summary


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_summary(summary: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Benchmark harness: run the pipeline over a directory and write a CSV table."""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path

from .exact import SolveOptions
from .instance import load as load_instance
from .metrics import format_deviation
from .pipeline import Reference, run_pipeline
from .slppr import PolishConfig
from .tour import Tour

log = logging.getLogger(__name__)

STAGES = ("merge", "ppr_merge", "polish1", "polish2", "large")

HEADER = ["instance", "n", "L_ref"]
for _s in STAGES:
    HEADER += [f"L_{_s}", f"dev_{_s}", f"t_{_s}"]
HEADER += ["N_d_large", "status"]

_STAGE_NAMES = {"merge": "merge", "ppr_merge": "ppr-merge", "large": "large-alpha"}


def load_references(path) -> dict:
    """``{name: Reference}`` from JSON mapping names to a cost or to
    ``{"cost": c, "q_I": [...], "q_P": [...]}``. Names match instance file
    names with or without the ``.json`` suffix.
    """
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError("reference file must hold a JSON object")
    out = {}
    for name, v in data.items():
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            out[name] = Reference(float(v))
        elif isinstance(v, dict) and "cost" in v:
            tour = Tour.from_dict(v) if "q_I" in v else None
            out[name] = Reference(float(v["cost"]), tour)
        else:
            raise ValueError(f"bad reference entry for {name!r}")
    return out


def _lookup(refs, path: Path):
    if not refs:
        return None
    return refs.get(path.name, refs.get(path.stem))


def _fmt_cost(v):
    return "" if v is None else f"{v:.6f}"


def _fmt_time(v):
    return "" if v is None else f"{v:.3f}"


def _fmt_dev(v):
    return "" if v is None else format_deviation(v)


def _row(name, report, ref):
    row = {"instance": name, "n": report.instance["n"],
           "L_ref": _fmt_cost(ref.cost if ref else None)}
    polish = [s for s in report.stages if s.name.startswith("polish")]
    picks = {
        "merge": report.stage("merge"),
        "ppr_merge": report.stage("ppr-merge"),
        "polish1": polish[0] if polish else None,
        "polish2": polish[-1] if polish else None,
        "large": report.stage("large-alpha"),
    }
    values = {}
    for key, st in picks.items():
        values[key] = st
        row[f"L_{key}"] = _fmt_cost(st.cost if st else None)
        row[f"dev_{key}"] = _fmt_dev(st.deviation_pct if st else None)
        row[f"t_{key}"] = _fmt_time(st.wall_time if st else None)
    large = picks["large"]
    row["N_d_large"] = "" if large is None or large.n_d is None else str(large.n_d)
    if not report.complete:
        row["status"] = "incomplete"
    elif report.time_limited:
        row["status"] = "time-limit"
    else:
        row["status"] = "ok"
    return row, values


def bench(directory, cfg: PolishConfig | None = None, alpha: float = 0.15,
          opts: SolveOptions | None = None, references: dict | None = None,
          use_ppr_merge: bool = True) -> str:
    """CSV text with one row per ``*.json`` instance (sorted by name) plus averages."""
    paths = sorted(Path(directory).glob("*.json"))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=HEADER, lineterminator="\r\n")
    w.writeheader()
    sums = {k: [] for k in HEADER}
    done = 0
    for path in paths:
        try:
            inst = load_instance(path)
        except Exception as exc:  # noqa: BLE001 - a bad file becomes a failed row
            log.warning("skipping %s: %s", path.name, exc)
            w.writerow({"instance": path.name, "status": f"failed: {exc}"})
            continue
        ref = _lookup(references, path)
        _, report = run_pipeline(inst, cfg, alpha, opts, use_ppr_merge, ref)
        row, values = _row(path.name, report, ref)
        w.writerow(row)
        done += 1
        if ref:
            sums["L_ref"].append(ref.cost)
        for key, st in values.items():
            if st is None:
                continue
            sums[f"L_{key}"].append(st.cost)
            sums[f"t_{key}"].append(st.wall_time)
            if st.deviation_pct is not None:
                sums[f"dev_{key}"].append(st.deviation_pct)
        if row["N_d_large"]:
            sums["N_d_large"].append(int(row["N_d_large"]))
    if done:
        avg = {"instance": "average", "n": "", "status": f"{done} rows"}
        for k in HEADER[2:-1]:
            vals = sums[k]
            if not vals:
                avg[k] = ""
                continue
            m = sum(vals) / len(vals)
            if k.startswith("dev_"):
                avg[k] = format_deviation(m)
            elif k.startswith("t_"):
                avg[k] = _fmt_time(m)
            elif k == "N_d_large":
                avg[k] = f"{m:.1f}"
            else:
                avg[k] = _fmt_cost(m)
        w.writerow(avg)
    return buf.getvalue()

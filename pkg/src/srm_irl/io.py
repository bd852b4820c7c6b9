"""Dataset, CSV and report serialisation."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .mdp import Demonstration, LqrSystem

DATASET_FORMAT = "srm-irl-demonstration"


def _num(x: float) -> str:
    # 17 significant digits round-trip every double exactly
    return format(float(x), ".17g")


def _dump_array(arr) -> str:
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 0:
        return _num(arr)
    return "[" + ",".join(_dump_array(row) for row in arr) + "]"


def save_demonstration(path, demo: Demonstration, system: LqrSystem, **extra) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format": DATASET_FORMAT,
        "version": 1,
        "state_dim": demo.state_dim,
        "action_dim": demo.action_dim,
        "horizon": demo.horizon,
        "discount": system.discount,
        "seed": demo.seed,
        "n_trajectories": len(demo),
        **extra,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for i in range(len(demo)):
            fh.write(
                '{"index":%d,"states":%s,"actions":%s}\n'
                % (i, _dump_array(demo.states[i]), _dump_array(demo.actions[i]))
            )
    return path


def load_demonstration(path) -> tuple[Demonstration, dict]:
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("format") != DATASET_FORMAT:
            raise ValueError(f"{path} is not a demonstration file")
        records = [json.loads(line) for line in fh if line.strip()]
    if len(records) != header["n_trajectories"]:
        raise ValueError(f"header announces {header['n_trajectories']} records, found {len(records)}")
    states = np.array([r["states"] for r in records], dtype=float)
    actions = np.array([r["actions"] for r in records], dtype=float)
    demo = Demonstration(states, actions, header.get("seed"))
    if demo.horizon != header["horizon"] or demo.state_dim != header["state_dim"]:
        raise ValueError("record shapes disagree with the header")
    return demo, header


def write_csv(path, columns, rows, comment: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())

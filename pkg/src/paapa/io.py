"""CSV and JSON persistence."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .graph import GraphState, ModelParams
from .seeding import derive_seed, rng_identity

EDGE_HEADER = ("step", "source", "target")


def metadata(params: ModelParams, replica_index: int | None = None, **extra) -> dict:
    """Metadata sufficient to regenerate an output bit for bit."""
    doc = {
        "model": "PA-APA family",
        "m": params.m,
        "p": params.p,
        "variant": params.variant.value,
        "T": params.horizon,
        "seed": params.seed,
        "replica_index": replica_index,
        "toolkit_version": __version__,
        "replicas": params.replicas,
        "rng": rng_identity(),
    }
    if replica_index is None:
        doc["replica_seeds"] = [derive_seed(params.seed, r) for r in range(params.replicas)]
    else:
        doc["replica_seed"] = derive_seed(params.seed, replica_index)
    doc.update(extra)
    return doc


def write_json(path: Path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def sidecar(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".json")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_edge_list(path: Path, state: GraphState) -> None:
    steps, sources, targets = state.edge_arrays()
    table = np.column_stack([steps, sources, targets])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(EDGE_HEADER) + "\n")
        np.savetxt(fh, table, fmt="%d", delimiter=",")


def read_edge_list(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != EDGE_HEADER:
            raise ValueError(f"{path}: expected header {','.join(EDGE_HEADER)}, got {','.join(header)}")
        table = np.loadtxt(fh, delimiter=",", dtype=np.int64, ndmin=2)
    if table.size == 0:
        table = table.reshape(0, 3)
    return table[:, 0], table[:, 1], table[:, 2]


def degrees_from_edges(sources: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Degrees of vertices ``1..max id``; a self-loop contributes 2."""
    n = int(max(sources.max(initial=0), targets.max(initial=0)))
    counts = np.bincount(np.concatenate([sources, targets]), minlength=n + 1)
    return counts[1:]

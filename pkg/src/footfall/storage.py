"""JSON persistence for corpora, models and layouts. All writes are atomic."""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, payload: dict, timestamp: bool = False) -> None:
    payload = dict(payload)
    payload.setdefault("format_version", FORMAT_VERSION)
    if timestamp:
        payload["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    atomic_write_text(path, json.dumps(payload, indent=1, sort_keys=True) + "\n")


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format_version {version}")
    return data


def corpus_to_dict(corpus) -> dict:
    return {"config": corpus.config.to_dict(), "patterns": corpus.patterns}


def corpus_from_dict(data: dict):
    from footfall.patterns import CorpusConfig, PatternCorpus

    config = CorpusConfig.from_dict(data["config"])
    patterns = [[int(a) for a in p] for p in data["patterns"]]
    for p in patterns:
        if not p:
            raise ValueError("corpus contains an empty pattern")
        if min(p) < 0 or max(p) >= config.n_activities:
            raise ValueError(f"corpus pattern {p} has ids outside [0, {config.n_activities})")
    return PatternCorpus(patterns, config)


def save_corpus(corpus, path, timestamp: bool = False) -> None:
    write_json(path, corpus_to_dict(corpus), timestamp)


def load_corpus(path):
    return corpus_from_dict(read_json(path))


def save_model(model, path, timestamp: bool = False) -> None:
    write_json(path, model.to_dict(), timestamp)


def load_model(path):
    from footfall.transition import TransitionModel

    return TransitionModel.from_dict(read_json(path))


def layout_to_dict(layout, pool, fitness: float) -> dict:
    genes = np.asarray(layout)
    return {
        "genes": genes.tolist(),
        "positions": pool.positions[genes].tolist(),
        "fitness": float(fitness),
        "pool": {"positions": pool.positions.tolist(), "anchor": int(pool.anchor)},
    }

"""File formats: the bit-exact binary configuration format, CSV tables,
JSON results, and run manifests.

Binary layout: magic ``PERCTRI1`` (8 bytes), box radius n (u32 LE), master
seed (u64 LE), trial id (u64 LE), then ceil((2n+1)^2 / 8) payload bytes of
site bits, row-major from (-n, -n), least-significant bit first, 1 = open.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .percolation import Configuration

MAGIC = b"PERCTRI1"


class FormatError(ValueError):
    """Malformed input file (bad magic, truncation, inconsistent sizes)."""


def config_to_bytes(config: Configuration) -> bytes:
    n = config.n
    head = MAGIC + n.to_bytes(4, "little") \
        + (config.master_seed & (2 ** 64 - 1)).to_bytes(8, "little") \
        + (config.trial_id & (2 ** 64 - 1)).to_bytes(8, "little")
    bits = np.packbits(config.grid.reshape(-1), bitorder="little")
    return head + bits.tobytes()


def config_from_bytes(data: bytes) -> Configuration:
    if len(data) < 28 or data[:8] != MAGIC:
        raise FormatError("not a PERCTRI1 configuration file")
    n = int.from_bytes(data[8:12], "little")
    seed = int.from_bytes(data[12:20], "little")
    trial = int.from_bytes(data[20:28], "little")
    w = 2 * n + 1
    need = (w * w + 7) // 8
    payload = data[28:]
    if len(payload) != need:
        raise FormatError(f"payload size {len(payload)} != expected {need}")
    flat = np.unpackbits(np.frombuffer(payload, dtype=np.uint8),
                         bitorder="little")[: w * w]
    grid = flat.reshape(w, w).astype(np.uint8)
    return Configuration(n=n, grid=grid, master_seed=seed, trial_id=trial)


def write_config(config: Configuration, path) -> None:
    Path(path).write_bytes(config_to_bytes(config))


def read_config(path) -> Configuration:
    return config_from_bytes(Path(path).read_bytes())


def write_csv(lines: list[str], path) -> None:
    Path(path).write_text("\n".join(lines) + "\n")


def read_table_csv(path):
    """Rows of the standard estimate table as dicts."""
    from .estimator import EstimateRow, EstimateTable
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0] != "n,quantity,tau,trials,mean,stderr,seed":
        raise FormatError("missing or wrong estimate table header")
    table = EstimateTable()
    for line in text[1:]:
        f = line.split(",")
        if len(f) != 7:
            raise FormatError(f"bad row: {line!r}")
        table.rows.append(EstimateRow(n=int(f[0]), quantity=f[1], tau=int(f[2]),
                                      trials=int(f[3]), mean=float(f[4]),
                                      stderr=float(f[5]),
                                      master_seed=int(f[6])))
    return table


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def oracle_json(result) -> str:
    doc = {
        "n": result.n,
        "moments": {q: {str(t): _frac(v) for t, v in d.items()}
                    for q, d in result.moments.items()},
        "arm_probabilities": {k: _frac(v)
                              for k, v in result.arm_probabilities.items()},
        "crossing_probability": _frac(result.crossing_probability),
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def graph_json(graph) -> str:
    def node_doc(node):
        return {
            "vertex": list(node.vertex),
            "label": list(node.label),
            "m": node.m,
            "box_exponent": node.box_exponent(),
            "children": [node_doc(ch) for ch in node.children],
        }
    doc = {
        "n": graph.n,
        "c": graph.c,
        "roots": [node_doc(r) for r in graph.roots],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def fit_json(fit) -> str:
    doc = asdict(fit)
    doc["points"] = [list(p) for p in fit.points]
    return json.dumps(doc, indent=2, sort_keys=True)


def gnuplot_script(rows, fit, quantity: str, data_path: str) -> str:
    lines = [
        "set logscale xy",
        "set xlabel 'n'",
        f"set ylabel 'mean {quantity}'",
        f"title_fit = 'slope {fit.slope:.4f}'",
        f"f(x) = exp({fit.intercept!r}) * x**({fit.slope!r})",
        f"plot '{data_path}' using 1:5 with points title '{quantity}', \\",
        "     f(x) with lines title title_fit",
    ]
    return "\n".join(lines) + "\n"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def write_manifest(outputs: list, command: str, parameters: dict,
                   master_seed: int | None, manifest_path) -> None:
    doc = {
        "command": command,
        "parameters": parameters,
        "master_seed": master_seed,
        "artifact_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "outputs": {str(p): sha256_file(p) for p in outputs},
    }
    Path(manifest_path).write_text(json.dumps(doc, indent=2, sort_keys=True))

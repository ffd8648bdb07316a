"""CSV/JSON persistence with fixed formatting for byte-stable reruns."""

import csv
import json
import os

import numpy as np

from . import __version__

FLOAT_FORMAT = ".17g"


def fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), FLOAT_FORMAT)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def pairing_rows(table):
    """Rows (replica, function_id, field, value); diagnostics use id 'diag'."""
    F = len(table.functions)
    for i in range(table.replicas):
        for field_name in ("log", "cnt"):
            vals = table.values(field_name)[i]
            for j in range(F):
                yield i, j, field_name, vals[j]
        for name, col in table.diagnostics.items():
            yield i, "diag", name, col[i]


def write_pairing_table(table, path):
    write_csv(path, ["replica", "function_id", "field", "value"], pairing_rows(table))


def read_pairing_csv(path):
    """Load a pairing CSV into {field: (M, F) array} plus diagnostics."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    M = 1 + max(int(r["replica"]) for r in rows)
    ids = sorted({int(r["function_id"]) for r in rows if r["function_id"] != "diag"})
    out = {"log": np.zeros((M, len(ids))), "cnt": np.zeros((M, len(ids)))}
    for r in rows:
        i = int(r["replica"])
        if r["function_id"] == "diag":
            out.setdefault(r["field"], np.zeros(M))[i] = float(r["value"])
        else:
            out[r["field"]][i, int(r["function_id"])] = float(r["value"])
    return out


def manifest(config, subcommand, outputs, extra=None):
    doc = {
        "version": __version__,
        "subcommand": subcommand,
        "seed": config.seed,
        "replicas": config.replicas,
        "config": config.to_dict(),
        "outputs": sorted(outputs),
    }
    if extra:
        doc.update(extra)
    return doc


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path

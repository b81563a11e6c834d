"""CSV and manifest writers.

Floats are written with repr(), the shortest string that round-trips, so
identical runs give byte-identical files.
"""
import csv
import json
import os

import numpy as np


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path, header, rows):
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as err:
        raise OSError(f"cannot write {path}: {err.strerror}") from err
    return path


def write_density(path, x, u, u_ref=None, u_limit=None):
    header = ["x", "u"]
    cols = [x, u]
    if u_ref is not None:
        header.append("u_ref")
        cols.append(u_ref)
    if u_limit is not None:
        header.append("u_limit")
        cols.append(u_limit)
    return write_csv(path, header, zip(*cols))


def write_truncation(path, report):
    return write_csv(path, ["dt", "error", "slope_local"], report.rows())


def write_spectrum(path, reports):
    rows = []
    for rep, zeta in reports:
        for k, lam in enumerate(rep.eigenvalues):
            rows.append((zeta, lam.real, lam.imag, "dominant" if k == 0 else "fast"))
    return write_csv(path, ["zeta", "re", "im", "cluster"], rows)


def write_region(path, regions):
    rows = []
    for reg in regions:
        for theta, tau, s in reg.rows():
            rows.append((theta, tau.real, tau.imag, s, reg.region, reg.method))
    return write_csv(path, ["theta", "re_tau", "im_tau", "abs_sigma", "region", "method"], rows)


def write_summary(path, selections):
    rows = [sel.summary_row() for sel in selections]
    return write_csv(path, ["epsilon", "gamma", "delta_t", "Delta_t_max", "K_min"], rows)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if np.isfinite(v) else repr(v)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_manifest(path, data):
    try:
        with open(path, "w") as fh:
            json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as err:
        raise OSError(f"cannot write {path}: {err.strerror}") from err
    return path

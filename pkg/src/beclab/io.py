"""Config loading, atomic CSV/JSON output, manifests and gnuplot scripts."""

from __future__ import annotations

import configparser
import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigInvalid

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


# config ---------------------------------------------------------------------------

def _ini_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path) -> dict:
    """Parse a TOML, JSON or INI config into a nested dict.

    INI values are decoded as JSON literals when possible (numbers, lists,
    booleans) and kept as strings otherwise.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigInvalid(f"config file not found: {path}")
    raw = path.read_bytes()
    suffix = path.suffix.lower()
    try:
        if suffix == ".json":
            cfg = json.loads(raw.decode("utf-8"))
        elif suffix in (".ini", ".cfg"):
            cp = configparser.ConfigParser()
            cp.optionxform = str
            cp.read_string(raw.decode("utf-8"))
            cfg = {k: _ini_value(v) for k, v in cp.defaults().items()}
            for sec in cp.sections():
                cfg[sec] = {k: _ini_value(v) for k, v in cp.items(sec) if k not in cp.defaults()}
        else:
            cfg = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigInvalid(f"cannot parse {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config root must be a table")
    return cfg


def section(cfg: dict, name: str, required: bool = False) -> dict:
    sub = cfg.get(name)
    if sub is None:
        if required:
            raise ConfigInvalid(f"missing [{name}] section")
        return {}
    if not isinstance(sub, dict):
        raise ConfigInvalid(f"[{name}] must be a table")
    return sub


def require(cfg: dict, key: str, kind=float):
    if key not in cfg:
        raise ConfigInvalid(f"missing key {key!r}")
    try:
        if kind is list:
            val = cfg[key]
            if not isinstance(val, list):
                raise TypeError
            return [float(x) for x in val]
        return kind(cfg[key])
    except (TypeError, ValueError):
        raise ConfigInvalid(f"key {key!r} has invalid value {cfg[key]!r}") from None


def get(cfg: dict, key: str, default, kind=float):
    if key not in cfg:
        return default
    return require(cfg, key, kind)


# formatting and atomic writes ------------------------------------------------------

def fmt(x) -> str:
    """Deterministic shortest round-trip text for numbers."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_json(path, data):
    _atomic_write(Path(path), json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def write_manifest(out_dir, version: str, subcommand: str, config_echo: dict, derived_params: dict,
                   timings: dict, status: dict, extra: Optional[dict] = None):
    data = {"version": version, "subcommand": subcommand, "config_echo": config_echo,
            "derived_params": derived_params, "timings": timings, "status": status}
    if extra:
        data.update(extra)
    write_json(Path(out_dir) / "manifest.json", data)


def write_field_csv(path, times, coords: Sequence[np.ndarray], values: Sequence[np.ndarray],
                    names: Sequence[str] = ("value",)):
    """Long-format export: columns t, x..., value(s); one row per (snapshot, node)."""
    dim = len(coords)
    xs = [np.asarray(c).ravel() for c in coords]
    header = ["t"] + [f"x{i + 1}" for i in range(dim)] + list(names)
    rows = []
    for i, t in enumerate(times):
        cols = [np.asarray(v[i]).ravel() for v in values]
        for j in range(xs[0].size):
            rows.append([float(t)] + [float(x[j]) for x in xs] + [float(c[j]) for c in cols])
    write_csv(path, header, rows)


# gnuplot ---------------------------------------------------------------------------

def write_gnuplot(path, csv_name: str, title: str, xlabel: str, ylabel: str,
                  columns: Sequence[tuple], logx: bool = False, logy: bool = False):
    """Standalone gnuplot script plotting ``columns`` = [(xcol, ycol, label), ...] of a CSV."""
    png = Path(path).with_suffix(".png").name
    lines = ["set datafile separator ','", "set key autotitle columnhead",
             "set terminal pngcairo size 800,600", f"set output '{png}'",
             f"set title '{title}'", f"set xlabel '{xlabel}'", f"set ylabel '{ylabel}'"]
    if logx:
        lines.append("set logscale x")
    if logy:
        lines.append("set logscale y")
    plots = [f"'{csv_name}' using {x}:{y} with linespoints title '{lab}'" for x, y, lab in columns]
    lines.append("plot " + ", \\\n     ".join(plots))
    _atomic_write(Path(path), "\n".join(lines) + "\n")

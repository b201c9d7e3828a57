"""Flat ``key = value`` config files.

Grammar:

    # comment
    schema_version = 1
    key = value
    group.key = value

Values are parsed as int, then float, then a whitespace/comma separated list of
numbers, else kept as a string. ``schema_version`` is required and must be 1.
"""

from __future__ import annotations

import configparser

import numpy as np

from ..configs import ConfigSpec, HandleBlueprint
from ..errors import ConfigurationError

SCHEMA_VERSION = 1
_SECTION = "config"


def parse_value(text):
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    parts = text.replace(",", " ").split()
    if len(parts) > 1:
        try:
            return [int(p) if p.lstrip("+-").isdigit() else float(p) for p in parts]
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(format_value(x) for x in (v.tolist() if isinstance(v, np.ndarray) else v))
    return str(v)


def loads(text):
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file: {exc}") from exc
    out = {k: parse_value(v) for k, v in cp[_SECTION].items()}
    version = out.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    return out


def dumps(mapping):
    lines = [f"schema_version = {SCHEMA_VERSION}"]
    for k, v in mapping.items():
        lines.append(f"{k} = {format_value(v)}")
    return "\n".join(lines) + "\n"


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc


def spec_to_mapping(spec: ConfigSpec):
    m = {"name": spec.name, "horizon": spec.horizon, "mode": spec.mode}
    if spec.dimension is not None:
        m["dimension"] = spec.dimension
    if spec.notes:
        m["notes"] = spec.notes
    m["prior"] = [float(x) for x in spec.prior]
    for i, h in enumerate(spec.handles):
        m[f"handle.{i}.kind"] = h.kind
        m[f"handle.{i}.name"] = h.name
        m[f"handle.{i}.R"] = float(h.R)
        m[f"handle.{i}.L"] = float(h.L)
        for k, v in h.params.items():
            if isinstance(v, dict):
                for kk, vv in v.items():
                    m[f"handle.{i}.{k}.{kk}"] = vv
            else:
                m[f"handle.{i}.{k}"] = v
    return m


def spec_from_mapping(m):
    m = dict(m)
    try:
        count = 1 + max(int(k.split(".")[1]) for k in m if k.startswith("handle."))
    except ValueError:
        raise ConfigurationError("config defines no handles") from None
    handles = []
    for i in range(count):
        pre = f"handle.{i}."
        fields = {k[len(pre):]: v for k, v in m.items() if k.startswith(pre)}
        try:
            kind, R, L = fields.pop("kind"), float(fields.pop("R")), float(fields.pop("L"))
        except KeyError as exc:
            raise ConfigurationError(f"handle {i} is missing {exc}") from None
        name = str(fields.pop("name", ""))
        params = {}
        for k, v in fields.items():
            if "." in k:
                outer, inner = k.split(".", 1)
                params.setdefault(outer, {})[inner] = v
            else:
                params[k] = v
        if kind == "kernel":
            params.setdefault("kernel_params", {})
        handles.append(HandleBlueprint(kind, R, L, params, name=name))
    prior = m.get("prior")
    prior = np.atleast_1d(np.asarray(prior, dtype=np.float64))
    dim = m.get("dimension")
    return ConfigSpec(str(m.get("name", "custom")), handles, prior, int(m["horizon"]),
                      notes=str(m.get("notes", "")), mode=str(m.get("mode", "oco")),
                      dimension=None if dim is None else int(dim))


def dump_spec(spec: ConfigSpec):
    return dumps(spec_to_mapping(spec))


def load_spec(text):
    return spec_from_mapping(loads(text))

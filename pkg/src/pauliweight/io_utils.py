"""Config parsing and atomic table output.

Config files are flat key=value text: one assignment per line, '#' starts a
comment, blank lines ignored, values are bare strings (no quoting).  Tables
go out as CSV with a '# key = value' metadata header plus a JSON mirror of
the same records; both are written atomically via a temp file and rename so
a failed run never leaves a partial file behind.
"""

from __future__ import annotations

import json
import os
import tempfile


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration (exit code 2)."""


def parse_config_text(text: str) -> dict:
    """Flat key=value grammar; later assignments win."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def parse_config(path) -> dict:
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def parse_overrides(pairs) -> dict:
    """key=value strings from the command line, same grammar as config lines."""
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def atomic_write_text(path, text: str) -> None:
    """Write via a same-directory temp file and atomic rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path, metadata: dict, columns, rows, json_mirror: bool = True):
    """CSV with '#' metadata header, plus a .json mirror of the records.

    Rows are sequences aligned with `columns`.  Output is byte-identical for
    identical inputs: fixed float formatting, fixed key order as given.
    """
    path = os.fspath(path)
    lines = [f"# {k} = {format_value(v)}" for k, v in metadata.items()]
    lines.append(",".join(columns))
    str_rows = [[format_value(v) for v in row] for row in rows]
    lines.extend(",".join(r) for r in str_rows)
    atomic_write_text(path, "\n".join(lines) + "\n")
    if json_mirror:
        payload = {
            "metadata": {k: format_value(v) for k, v in metadata.items()},
            "columns": list(columns),
            "rows": str_rows,
        }
        base, _ = os.path.splitext(path)
        atomic_write_text(base + ".json", json.dumps(payload, indent=1) + "\n")

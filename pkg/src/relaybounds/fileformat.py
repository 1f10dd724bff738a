"""JSON channel files and sweep CSV output.

A channel file is a single JSON object::

    {"x_size": 2, "t_size": 2, "y_size": 3,
     "p_t": [0.3, 0.7],
     "kernel": [[[...y...], ...t...], ...x...],
     "family": "erasure:alpha=0.3,eps=0.4"}

``family`` is optional. When present it must name a zoo channel whose kernel
equals the file's exactly; it lets closed-form reference columns be filled.
"""
from __future__ import annotations

import io
import json
from typing import Iterable

import numpy as np

from .bounds import SweepRow
from .probability import MASS_TOL, ChannelSpec

REQUIRED = ("x_size", "t_size", "y_size", "p_t", "kernel")
OPTIONAL = ("family",)
CSV_HEADER = ("r0", "cutset", "upper_bound", "caf", "closed_capacity", "closed_cutset")


class ChannelFileError(ValueError):
    """A channel file is malformed; the message names the offending field or line."""


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ChannelFileError(f"{where}: expected a number, got {value!r}")
    v = float(value)
    if not np.isfinite(v) or v < 0:
        raise ChannelFileError(f"{where}: {v!r} is not a probability")
    return v


def _vector(values, size: int, where: str) -> np.ndarray:
    if not isinstance(values, list):
        raise ChannelFileError(f"{where}: expected a list of {size} numbers")
    if len(values) != size:
        raise ChannelFileError(f"{where}: has {len(values)} entries, expected {size}")
    out = np.array([_number(v, f"{where}[{i}]") for i, v in enumerate(values)])
    if abs(out.sum() - 1.0) > MASS_TOL:
        raise ChannelFileError(f"{where} sums to {float(out.sum()):.12g}, not 1")
    return out


def _size(data: dict, key: str) -> int:
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ChannelFileError(f"{key}: expected a positive integer, got {v!r}")
    return v


def parse_channel(text: str) -> tuple[ChannelSpec, str | None]:
    """Parse channel-file text into a channel and its optional zoo family name."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ChannelFileError("top level must be a JSON object")
    unknown = sorted(set(data) - set(REQUIRED) - set(OPTIONAL))
    if unknown:
        raise ChannelFileError(f"unknown field(s): {', '.join(unknown)}")
    missing = [k for k in REQUIRED if k not in data]
    if missing:
        raise ChannelFileError(f"missing field(s): {', '.join(missing)}")
    nx, nt, ny = (_size(data, k) for k in ("x_size", "t_size", "y_size"))
    p_t = _vector(data["p_t"], nt, "p_t")
    kernel = data["kernel"]
    if not isinstance(kernel, list) or len(kernel) != nx:
        raise ChannelFileError(f"kernel: expected {nx} input rows")
    rows = np.empty((nx, nt, ny))
    for x, block in enumerate(kernel):
        if not isinstance(block, list) or len(block) != nt:
            raise ChannelFileError(f"kernel[{x}]: expected {nt} state rows")
        for t, row in enumerate(block):
            rows[x, t] = _vector(row, ny, f"kernel[{x}][{t}]")
    channel = ChannelSpec(p_t=p_t, kernel=rows)

    family = data.get("family")
    if family is not None:
        from .zoo import from_name

        if not isinstance(family, str):
            raise ChannelFileError("family: expected a string")
        try:
            zoo_channel = from_name(family).channel
        except ValueError as exc:
            raise ChannelFileError(f"family: {exc}") from None
        if zoo_channel != channel:
            raise ChannelFileError(f"family: {family!r} does not match the file's p_t and kernel")
    return channel, family


def channel_to_dict(channel: ChannelSpec, family: str | None = None) -> dict:
    out = {
        "x_size": channel.x_size,
        "t_size": channel.t_size,
        "y_size": channel.y_size,
        "p_t": [float(v) for v in channel.p_t],
        "kernel": [[[float(v) for v in row] for row in block] for block in channel.kernel],
    }
    if family is not None:
        out["family"] = family
    return out


def channel_to_text(channel: ChannelSpec, family: str | None = None) -> str:
    # json writes floats with repr(), so parse_channel recovers them bit for bit
    return json.dumps(channel_to_dict(channel, family), indent=1) + "\n"


def read_channel(path) -> tuple[ChannelSpec, str | None]:
    with open(path, encoding="utf-8") as fh:
        return parse_channel(fh.read())


def write_channel(path, channel: ChannelSpec, family: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(channel_to_text(channel, family))


def _cell(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value + 0.0:.6f}"   # + 0.0 folds -0.0 into 0.0


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    """Fixed header, six decimals, empty cells where no closed form applies."""
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for r in rows:
        buf.write(",".join(_cell(getattr(r, k)) for k in CSV_HEADER) + "\n")
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[SweepRow]:
    lines = text.strip().splitlines()
    if not lines or tuple(lines[0].split(",")) != CSV_HEADER:
        raise ValueError("not a sweep CSV: header mismatch")
    rows = []
    for line in lines[1:]:
        cells = [float(c) if c else None for c in line.split(",")]
        rows.append(SweepRow(*cells))
    return rows

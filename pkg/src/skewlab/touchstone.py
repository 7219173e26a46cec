"""Touchstone v1 reader/writer for 2- and 4-port files.

Implements the classic format quirks precisely: the option line with
per-field defaults (GHz, S, MA, R 50), the 2-port column order
S11 S21 S12 S22, row-major matrix blocks for 4 ports with arbitrary line
wrapping, inline ``!`` comments, and noise-parameter sections in 2-port
files (ignored with a warning). Version-2 keyword sections are rejected.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    MalformedRecord,
    NonMonotonicFrequency,
    PortCountMismatch,
    UnsupportedParameter,
)
from .network import SingleEndedNetwork

_UNIT_SCALE = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_FORMATS = ("ri", "ma", "db")

# magnitude written in DB format cannot represent an exact zero; anything
# at or below this is emitted as the floor value instead
_DB_WRITE_FLOOR = -1000.0


@dataclass
class TouchstoneOptions:
    """Writer-side option-line settings (parameter type is always S)."""

    frequency_unit: str = "GHz"
    fmt: str = "MA"
    resistance: float = 50.0

    def __post_init__(self):
        if self.frequency_unit.lower() not in _UNIT_SCALE:
            raise ValueError(f"unknown frequency unit {self.frequency_unit!r}")
        if self.fmt.lower() not in _FORMATS:
            raise ValueError(f"unknown format {self.fmt!r} (RI, MA or DB)")
        if not self.resistance > 0.0:
            raise ValueError("reference resistance must be positive")


def _parse_option_line(line: str, source: str):
    """Returns (unit_scale, fmt, resistance) with v1 defaults filled in."""
    fields = line[1:].split()
    unit = fmt = param = None
    resistance = None
    i = 0
    while i < len(fields):
        tok = fields[i].lower()
        if tok in _UNIT_SCALE:
            unit = tok
        elif tok in _FORMATS:
            fmt = tok
        elif tok in ("s", "y", "z", "g", "h"):
            param = tok
        elif tok == "r":
            i += 1
            if i >= len(fields):
                raise MalformedRecord(f"{source}: option line ends after R")
            try:
                resistance = float(fields[i])
            except ValueError:
                raise MalformedRecord(f"{source}: bad reference resistance {fields[i]!r}") from None
        else:
            raise MalformedRecord(f"{source}: unrecognized option token {fields[i]!r}")
        i += 1
    param = param or "s"
    if param != "s":
        raise UnsupportedParameter(
            f"{source}: parameter type {param.upper()!r} not supported (S only)"
        )
    return _UNIT_SCALE[unit or "ghz"], fmt or "ma", 50.0 if resistance is None else resistance


def _block_to_matrix(vals: np.ndarray, fmt: str, n: int) -> np.ndarray:
    pairs = vals.reshape(n * n, 2)
    if fmt == "ri":
        c = pairs[:, 0] + 1j * pairs[:, 1]
    elif fmt == "ma":
        c = pairs[:, 0] * np.exp(1j * np.deg2rad(pairs[:, 1]))
    else:  # db
        c = 10.0 ** (pairs[:, 0] / 20.0) * np.exp(1j * np.deg2rad(pairs[:, 1]))
    if n == 2:
        # 2-port files store S11 S21 S12 S22
        return np.array([[c[0], c[2]], [c[1], c[3]]])
    return c.reshape(n, n)  # row-major for 4 ports


def _parse_text(text: str, n: int, source: str) -> SingleEndedNetwork:
    scale, fmt, _resistance = _UNIT_SCALE["ghz"], "ma", 50.0
    saw_option = False
    tokens: list[str] = []
    for raw in text.splitlines():
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            key = line.split("]", 1)[0] + "]"
            raise UnsupportedParameter(
                f"{source}: keyword section {key} is a Touchstone v2 feature; only v1 is handled"
            )
        if line.startswith("#"):
            if saw_option:
                raise MalformedRecord(f"{source}: multiple option lines")
            scale, fmt, _resistance = _parse_option_line(line, source)
            saw_option = True
            continue
        tokens.extend(line.split())

    numbers = np.empty(len(tokens))
    for k, tok in enumerate(tokens):
        try:
            numbers[k] = float(tok)
        except ValueError:
            raise MalformedRecord(f"{source}: non-numeric token {tok!r}") from None

    per_block = 1 + 2 * n * n
    freqs: list[float] = []
    mats: list[np.ndarray] = []
    i = 0
    while i < numbers.size:
        f = numbers[i] * scale
        if freqs and f <= freqs[-1]:
            if n == 2 and f < freqs[-1]:
                warnings.warn(
                    f"{source}: ignoring noise-parameter section "
                    f"({numbers.size - i} trailing values)",
                    stacklevel=2,
                )
                break
            raise NonMonotonicFrequency(
                f"{source}: frequency {f:.6g} Hz does not increase past {freqs[-1]:.6g} Hz"
            )
        if numbers.size - i < per_block:
            raise MalformedRecord(
                f"{source}: truncated record at {f:.6g} Hz "
                f"({numbers.size - i - 1} of {per_block - 1} values)"
            )
        freqs.append(f)
        mats.append(_block_to_matrix(numbers[i + 1 : i + per_block], fmt, n))
        i += per_block

    if len(freqs) < 2:
        # the network contract needs two points for anything downstream
        # (unwrapping, interpolation), so a one-record file is unusable
        raise MalformedRecord(f"{source}: need at least two data records, got {len(freqs)}")
    return SingleEndedNetwork(np.array(freqs), np.array(mats))


def parse_touchstone(path) -> SingleEndedNetwork:
    """Read a .s2p/.s4p file into a SingleEndedNetwork (default port map)."""
    path = Path(path)
    m = re.search(r"\.s(\d+)p$", path.name, re.IGNORECASE)
    if not m:
        raise MalformedRecord(f"{path}: cannot infer port count from extension")
    n = int(m.group(1))
    if n not in (2, 4):
        raise PortCountMismatch(f"{path}: {n}-port files are not supported (2 or 4 only)")
    return _parse_text(path.read_text(), n, str(path))


def _format_entry(value: complex, fmt: str) -> str:
    if fmt == "ri":
        return f"{value.real:.17g} {value.imag:.17g}"
    mag = abs(value)
    ang = np.rad2deg(np.angle(value)) if mag > 0.0 else 0.0
    if fmt == "ma":
        return f"{mag:.17g} {ang:.17g}"
    db = 20.0 * np.log10(mag) if mag > 0.0 else _DB_WRITE_FLOOR
    db = max(db, _DB_WRITE_FLOOR)
    return f"{db:.17g} {ang:.17g}"


def write_touchstone(net: SingleEndedNetwork, path, options: TouchstoneOptions | None = None):
    """Write a network as Touchstone v1 with >= 15 significant digits.

    4-port matrices are emitted row-major, four entries per line; 2-port
    records use the standard single-line S11 S21 S12 S22 order.
    """
    opt = options or TouchstoneOptions()
    unit = opt.frequency_unit.lower()
    scale = _UNIT_SCALE[unit]
    fmt = opt.fmt.lower()
    unit_name = {"hz": "Hz", "khz": "kHz", "mhz": "MHz", "ghz": "GHz"}[unit]
    lines = [f"# {unit_name} S {fmt.upper()} R {opt.resistance:.17g}"]
    n = net.n_ports
    for k, f in enumerate(net.frequencies):
        s = net.s[k]
        ftok = f"{f / scale:.17g}"
        if n == 2:
            order = (s[0, 0], s[1, 0], s[0, 1], s[1, 1])
            lines.append(ftok + " " + " ".join(_format_entry(v, fmt) for v in order))
        else:
            pad = " " * len(ftok)
            for row in range(4):
                head = ftok if row == 0 else pad
                lines.append(head + " " + " ".join(_format_entry(s[row, col], fmt) for col in range(4)))
    Path(path).write_text("\n".join(lines) + "\n")

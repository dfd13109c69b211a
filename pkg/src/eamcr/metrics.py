"""Evaluation metrics: mask overlap, efficiency tables and run aggregates."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path

from .energy import dlei, energy_per_inference, mj_to_mwh
from .errors import DimensionMismatch, EmptyInput, ParseError, UnknownTask
from .profiles import ACCELERATOR_ORDER, AcceleratorKind, ProfileSet


@dataclass(frozen=True)
class BinaryMask:
    width: int
    height: int
    bits: tuple  # row-major, truthy = pixel set

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"mask dimensions must be positive, got {self.width}x{self.height}")
        if len(self.bits) != self.width * self.height:
            raise ValueError(f"expected {self.width * self.height} bits, got {len(self.bits)}")

    @classmethod
    def from_rows(cls, rows) -> "BinaryMask":
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        return cls(width, len(rows), tuple(bool(b) for r in rows for b in r))

    def count(self) -> int:
        return sum(1 for b in self.bits if b)


def jaccard_index(x: BinaryMask, y: BinaryMask) -> float:
    """Intersection over union of the set pixels of two masks.

    Two empty masks describe the same (empty) region, so they score 1.0.
    """
    if (x.width, x.height) != (y.width, y.height):
        raise DimensionMismatch(f"{x.width}x{x.height} vs {y.width}x{y.height}")
    inter = union = 0
    for a, b in zip(x.bits, y.bits):
        if a or b:
            union += 1
            if a and b:
                inter += 1
    if union == 0:
        return 1.0
    return inter / union


def _pbm_tokens(data: bytes, count: int):
    """Split the first ``count`` header tokens off ``data``, skipping comments.

    Returns the tokens and the offset just past the last token.
    """
    tokens = []
    i = 0
    while len(tokens) < count:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i >= len(data):
            raise ParseError("truncated PBM header")
        if data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        tokens.append(data[start:i])
    return tokens, i


def parse_pbm(data: bytes) -> BinaryMask:
    """Decode a plain (P1) or raw (P4) PBM image. Black pixels (1) are set."""
    (magic, w, h), end = _pbm_tokens(data, 3)
    try:
        width, height = int(w), int(h)
    except ValueError:
        raise ParseError(f"bad PBM dimensions {w!r} x {h!r}") from None
    if width <= 0 or height <= 0:
        raise ParseError(f"bad PBM dimensions {width} x {height}")
    n = width * height
    if magic == b"P1":
        bits = []
        for ch in data[end:].decode("ascii", errors="replace"):
            if ch in "01":
                bits.append(ch == "1")
            elif ch == "#":
                raise ParseError("comments inside P1 raster are not supported")
            elif not ch.isspace():
                raise ParseError(f"unexpected character {ch!r} in P1 raster")
            if len(bits) == n:
                break
        if len(bits) != n:
            raise ParseError(f"P1 raster holds {len(bits)} pixels, expected {n}")
        return BinaryMask(width, height, tuple(bits))
    if magic == b"P4":
        raster = data[end + 1 :]
        stride = (width + 7) // 8
        if len(raster) < stride * height:
            raise ParseError(f"P4 raster holds {len(raster)} bytes, expected {stride * height}")
        bits = []
        for row in range(height):
            line = raster[row * stride : (row + 1) * stride]
            bits.extend(bool(line[c // 8] & (0x80 >> (c % 8))) for c in range(width))
        return BinaryMask(width, height, tuple(bits))
    raise ParseError(f"not a PBM file (magic {magic!r})")


def read_pbm(path) -> BinaryMask:
    return parse_pbm(Path(path).read_bytes())


def to_pbm(mask: BinaryMask) -> bytes:
    """Encode ``mask`` as plain P1 text."""
    rows = []
    for r in range(mask.height):
        row = mask.bits[r * mask.width : (r + 1) * mask.width]
        rows.append(" ".join("1" if b else "0" for b in row))
    return f"P1\n{mask.width} {mask.height}\n".encode() + "\n".join(rows).encode() + b"\n"


# --- efficiency table -------------------------------------------------------


@dataclass(frozen=True)
class DleiRow:
    model_name: str
    accelerator: AcceleratorKind
    accuracy: float
    mean_energy_mwh: float
    dlei: float


def dlei_table(profiles: ProfileSet, task: str) -> list:
    """One row per (model, accelerator) runtime of ``task``, grouped by
    accelerator and sorted by descending index within each group."""
    models = [m for m in profiles.models if m.task == task]
    if not models:
        raise UnknownTask(task)
    rows = []
    for m in models:
        for kind, rt in m.runtimes.items():
            energy = energy_per_inference(rt)
            rows.append(DleiRow(m.name, kind, m.accuracy, mj_to_mwh(energy), dlei(m.accuracy, energy)))
    rows.sort(key=lambda r: (ACCELERATOR_ORDER[r.accelerator], -r.dlei, r.model_name))
    return rows


# --- aggregation ------------------------------------------------------------


@dataclass(frozen=True)
class Stats:
    mean: float
    min: float
    max: float
    std: float

    @classmethod
    def of(cls, values) -> "Stats":
        values = list(values)
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        return cls(statistics.fmean(values), min(values), max(values), std)


@dataclass(frozen=True)
class Summary:
    n: int
    operating_time_s: Stats
    utility: Stats


def aggregate(results) -> Summary:
    """Mean, range and sample standard deviation (n - 1; zero for a single
    run) of operating time and utility across repeated runs."""
    results = list(results)
    if not results:
        raise EmptyInput("aggregate() needs at least one result")
    return Summary(
        len(results),
        Stats.of(r.operating_time_s for r in results),
        Stats.of(r.utility for r in results),
    )

"""Oriented point-edge sets: the core representation, text serialization, and
a uniform-grid spatial index.

An edge is an unchained local feature: a subpixel position, a tangent
orientation on the full circle (so contrast polarity is preserved), a signed
isophote curvature, a detection confidence, and a reliability flag.  Edge sets
carry the pixel frame they were measured in; positions always lie inside that
frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

EDGESET_VERSION = 1


class EdgeSetFormatError(ValueError):
    """Malformed EDGESET text or values violating the set invariants."""


def angular_distance(a: float, b: float) -> float:
    """Shortest angular distance between two orientations, in [0, pi].

    Both arguments are angles in radians; the result is the length of the
    shorter arc between them on the circle.
    """
    d = math.fmod(abs(a - b), TWO_PI)
    return min(d, TWO_PI - d)


def angular_distance_array(a: np.ndarray, b) -> np.ndarray:
    """Vectorized counterpart of :func:`angular_distance`.

    Matches the scalar function bit for bit: fmod of the absolute difference,
    then the shorter of the two arcs.
    """
    d = np.mod(np.abs(np.asarray(a, dtype=np.float64) - b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class Edge:
    """A single oriented edge.

    theta is the tangent orientation in [0, 2*pi); kappa the signed isophote
    curvature in 1/pixels; confidence a detection strength in [0, 1];
    reliable marks edges stable enough to seed basis hypotheses.
    """

    x: float
    y: float
    theta: float
    kappa: float = 0.0
    confidence: float = 1.0
    reliable: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("edge position must be finite")
        if not (0.0 <= self.theta < TWO_PI):
            raise ValueError(f"theta must lie in [0, 2*pi), got {self.theta}")
        if not math.isfinite(self.kappa):
            raise ValueError("kappa must be finite")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")


class EdgeArrays(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    confidence: np.ndarray
    reliable: np.ndarray


@dataclass
class EdgeSet:
    """An ordered collection of edges in a width x height pixel frame.

    Treated as immutable after construction; the column-array view built by
    :meth:`arrays` is cached on first use and shared by readers.
    """

    width: int
    height: int
    edges: list[Edge] = field(default_factory=list)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be at least 1x1")
        for k, e in enumerate(self.edges):
            if not (0.0 <= e.x < self.width and 0.0 <= e.y < self.height):
                raise ValueError(
                    f"edge {k} at ({e.x}, {e.y}) outside "
                    f"{self.width}x{self.height} frame"
                )
        self._cache: EdgeArrays | None = None

    def __len__(self) -> int:
        return len(self.edges)

    def arrays(self) -> EdgeArrays:
        if self._cache is None:
            es = self.edges
            self._cache = EdgeArrays(
                x=np.array([e.x for e in es], dtype=np.float64),
                y=np.array([e.y for e in es], dtype=np.float64),
                theta=np.array([e.theta for e in es], dtype=np.float64),
                kappa=np.array([e.kappa for e in es], dtype=np.float64),
                confidence=np.array([e.confidence for e in es], dtype=np.float64),
                reliable=np.array([e.reliable for e in es], dtype=bool),
            )
        return self._cache

    @property
    def frame_diagonal(self) -> float:
        return math.sqrt(self.width * self.width + self.height * self.height)


def _fmt6(v: float) -> str:
    return f"{v:.6f}"


def _fmt_position(v: float, bound: int) -> str:
    # Quantizing to 6 decimals may round a position up onto the frame bound;
    # clamp so the serialized value still parses as in-frame.
    s = _fmt6(v)
    if float(s) >= bound:
        s = _fmt6(bound - 1e-6)
    return s


def serialize(es: EdgeSet) -> bytes:
    """Encode an edge set as EDGESET v1 text (ASCII, LF newlines).

    Float fields are written with 6 fractional digits, which quantizes the
    set onto that grid: parse(serialize(s)) re-serializes to identical bytes.
    """
    lines = [f"EDGESET {EDGESET_VERSION}", f"{es.width} {es.height} {len(es.edges)}"]
    for e in es.edges:
        lines.append(
            " ".join(
                (
                    _fmt_position(e.x, es.width),
                    _fmt_position(e.y, es.height),
                    _fmt6(e.theta),
                    _fmt6(e.kappa),
                    _fmt6(e.confidence),
                    "1" if e.reliable else "0",
                )
            )
        )
    return ("\n".join(lines) + "\n").encode("ascii")


def _parse_float(token: str, what: str, lineno: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise EdgeSetFormatError(f"line {lineno}: non-numeric {what} {token!r}") from None
    if not math.isfinite(v):
        raise EdgeSetFormatError(f"line {lineno}: non-finite {what} {token!r}")
    return v


def parse(data: bytes | str) -> EdgeSet:
    """Decode EDGESET v1 text into an :class:`EdgeSet`.

    Raises :class:`EdgeSetFormatError` with a distinct message for version
    mismatches, malformed headers, wrong per-line field counts, out-of-range
    values, and edge-count mismatches.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("ascii")
        except UnicodeDecodeError:
            raise EdgeSetFormatError("edge-set data is not ASCII") from None
    else:
        text = data
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise EdgeSetFormatError("empty edge-set data")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "EDGESET":
        raise EdgeSetFormatError(f"not an EDGESET file (first line {lines[0]!r})")
    if head[1] != str(EDGESET_VERSION):
        raise EdgeSetFormatError(f"unsupported EDGESET version {head[1]!r}")
    if len(lines) < 2:
        raise EdgeSetFormatError("missing dimension header line")
    dims = lines[1].split()
    if len(dims) != 3:
        raise EdgeSetFormatError(f"dimension line must have 3 fields, got {len(dims)}")
    try:
        width, height, count = (int(t) for t in dims)
    except ValueError:
        raise EdgeSetFormatError(f"non-integer dimension header {lines[1]!r}") from None
    if width < 1 or height < 1:
        raise EdgeSetFormatError(f"frame dimensions must be positive, got {width}x{height}")
    if count < 0:
        raise EdgeSetFormatError(f"negative edge count {count}")
    body = lines[2:]
    if len(body) != count:
        raise EdgeSetFormatError(f"header declares {count} edges, file has {len(body)} lines")
    edges = []
    for k, line in enumerate(body):
        lineno = k + 3
        fields = line.split()
        if len(fields) != 6:
            raise EdgeSetFormatError(f"line {lineno}: expected 6 fields, got {len(fields)}")
        x = _parse_float(fields[0], "x", lineno)
        y = _parse_float(fields[1], "y", lineno)
        theta = _parse_float(fields[2], "theta", lineno)
        kappa = _parse_float(fields[3], "kappa", lineno)
        conf = _parse_float(fields[4], "confidence", lineno)
        if fields[5] not in ("0", "1"):
            raise EdgeSetFormatError(f"line {lineno}: reliable flag must be 0 or 1")
        if not (0.0 <= theta < TWO_PI):
            raise EdgeSetFormatError(f"line {lineno}: theta {theta} outside [0, 2*pi)")
        if not (0.0 <= conf <= 1.0):
            raise EdgeSetFormatError(f"line {lineno}: confidence {conf} outside [0, 1]")
        if not (0.0 <= x < width and 0.0 <= y < height):
            raise EdgeSetFormatError(f"line {lineno}: position ({x}, {y}) outside frame")
        edges.append(Edge(x, y, theta, kappa, conf, fields[5] == "1"))
    return EdgeSet(width, height, edges)


@dataclass
class SpatialIndex:
    """Uniform-grid bucket index over edge positions.

    Buckets map integer cell coordinates (floor(x/cell), floor(y/cell)) to
    ascending arrays of edge indices.
    """

    cell_size: float
    buckets: dict[tuple[int, int], np.ndarray]


def build_index(es: EdgeSet, cell_size: float) -> SpatialIndex:
    if not (cell_size > 0.0 and math.isfinite(cell_size)):
        raise ValueError("cell_size must be positive and finite")
    arr = es.arrays()
    grouped: dict[tuple[int, int], list[int]] = {}
    if len(es) > 0:
        cx = np.floor(arr.x / cell_size).astype(np.int64)
        cy = np.floor(arr.y / cell_size).astype(np.int64)
        for i in range(len(es)):
            grouped.setdefault((int(cx[i]), int(cy[i])), []).append(i)
    buckets = {c: np.array(ix, dtype=np.int64) for c, ix in grouped.items()}
    return SpatialIndex(cell_size=cell_size, buckets=buckets)


def _gather_candidates(index: SpatialIndex, x: float, y: float, radius: float) -> np.ndarray:
    cs = index.cell_size
    cx0 = math.floor((x - radius) / cs)
    cx1 = math.floor((x + radius) / cs)
    cy0 = math.floor((y - radius) / cs)
    cy1 = math.floor((y + radius) / cs)
    parts = []
    # Candidates are a superset anyway (exact predicates follow), so when the
    # window spans more cells than exist, walking the occupied buckets is
    # equivalent and bounds the cost by the edge count.
    if (cx1 - cx0 + 1) * (cy1 - cy0 + 1) >= len(index.buckets):
        for (cx, cy), b in index.buckets.items():
            if cx0 <= cx <= cx1 and cy0 <= cy <= cy1:
                parts.append(b)
    else:
        for cy in range(cy0, cy1 + 1):
            for cx in range(cx0, cx1 + 1):
                b = index.buckets.get((cx, cy))
                if b is not None:
                    parts.append(b)
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts)


def _query_near_arr(
    index: SpatialIndex,
    es: EdgeSet,
    x: float,
    y: float,
    radius: float,
    theta: float,
    eps_theta: float,
) -> np.ndarray:
    cand = _gather_candidates(index, x, y, radius)
    if cand.size == 0:
        return cand
    arr = es.arrays()
    dx = arr.x[cand] - x
    dy = arr.y[cand] - y
    ok = (dx * dx + dy * dy <= radius * radius) & (
        angular_distance_array(arr.theta[cand], theta) <= eps_theta
    )
    return np.sort(cand[ok])


def query_near(
    index: SpatialIndex,
    es: EdgeSet,
    x: float,
    y: float,
    radius: float,
    theta: float,
    eps_theta: float,
) -> list[int]:
    """Indices of edges within `radius` of (x, y) and within `eps_theta` of
    `theta`, in ascending index order.

    The distance predicate is evaluated as dx*dx + dy*dy <= radius*radius;
    results are identical to a full scan applying the same tests.
    """
    if radius < 0.0:
        raise ValueError("radius must be non-negative")
    return [int(i) for i in _query_near_arr(index, es, x, y, radius, theta, eps_theta)]

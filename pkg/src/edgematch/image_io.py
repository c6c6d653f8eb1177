"""PGM (P2/P5) loading and saving for normalized grayscale rasters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_WS = frozenset(b" \t\r\n\x0b\x0c")


class PgmFormatError(ValueError):
    """Malformed or unsupported PGM data."""


@dataclass
class GrayImage:
    """Grayscale raster with float64 intensities in [0, 1].

    The origin is the top-left pixel, x grows rightward along columns and y
    downward along rows; `pixels` has shape (height, width).
    """

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be at least 1x1")
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel array shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}"
            )
        if not np.all(np.isfinite(self.pixels)):
            raise ValueError("pixel intensities must be finite")
        if float(self.pixels.min()) < 0.0 or float(self.pixels.max()) > 1.0:
            raise ValueError("pixel intensities must lie in [0, 1]")

    @classmethod
    def from_array(cls, a) -> "GrayImage":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls(width=a.shape[1], height=a.shape[0], pixels=a)


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WS:
            pos += 1
        elif c == 0x23:  # '#' comment runs to end of line
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        else:
            break
    if pos >= n:
        raise PgmFormatError("truncated header")
    start = pos
    while pos < n and data[pos] not in _WS and data[pos] != 0x23:
        pos += 1
    return data[start:pos], pos


def _maybe_token(data: bytes, pos: int):
    try:
        return _next_token(data, pos)
    except PgmFormatError:
        return None, len(data)


def _token_int(tok: bytes, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise PgmFormatError(f"non-numeric {what} field {tok!r}") from None


def load_pgm(data: bytes) -> GrayImage:
    """Parse P2 (ASCII) or P5 (binary) PGM bytes, normalizing by maxval.

    Accepts '#' comments in the header, maxval up to 65535 (two-byte
    big-endian samples in P5 when maxval > 255), and reports distinct errors
    for bad magic numbers, zero dimensions, a zero maxval, and truncated or
    oversized payloads.
    """
    data = bytes(data)
    magic, pos = _next_token(data, 0)
    if magic not in (b"P2", b"P5"):
        raise PgmFormatError(f"unsupported magic {magic!r}, expected P2 or P5")
    tok, pos = _next_token(data, pos)
    width = _token_int(tok, "width")
    tok, pos = _next_token(data, pos)
    height = _token_int(tok, "height")
    tok, pos = _next_token(data, pos)
    maxval = _token_int(tok, "maxval")
    if width <= 0 or height <= 0:
        raise PgmFormatError(f"image dimensions must be positive, got {width}x{height}")
    if maxval == 0:
        raise PgmFormatError("maxval must be positive")
    if maxval < 0 or maxval > 65535:
        raise PgmFormatError(f"maxval {maxval} outside [1, 65535]")
    n = width * height

    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WS:
            raise PgmFormatError("missing single whitespace before binary payload")
        payload = data[pos + 1 :]
        bps = 1 if maxval < 256 else 2
        if len(payload) < n * bps:
            raise PgmFormatError(
                f"binary payload truncated: {len(payload)} bytes, expected {n * bps}"
            )
        if len(payload) > n * bps:
            raise PgmFormatError(
                f"binary payload has {len(payload) - n * bps} trailing bytes"
            )
        dtype = np.dtype(">u2") if bps == 2 else np.dtype(np.uint8)
        raw = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    else:
        vals = np.empty(n, dtype=np.float64)
        for i in range(n):
            tok, pos = _maybe_token(data, pos)
            if tok is None:
                raise PgmFormatError(f"ASCII payload truncated after {i} of {n} samples")
            v = _token_int(tok, "sample")
            if v < 0 or v > maxval:
                raise PgmFormatError(f"sample {v} outside [0, {maxval}]")
            vals[i] = v
        tok, _ = _maybe_token(data, pos)
        if tok is not None:
            raise PgmFormatError("trailing data after final sample")
        raw = vals
    if magic == b"P5":
        bad = raw > maxval
        if bad.any():
            raise PgmFormatError(f"sample {int(raw[bad][0])} exceeds maxval {maxval}")
    pixels = (raw / float(maxval)).reshape(height, width)
    return GrayImage(width=width, height=height, pixels=pixels)


def save_pgm(img: GrayImage, ascii: bool = False) -> bytes:
    """Encode at maxval 255, quantizing with round-half-up.

    P5 by default; `ascii=True` emits P2 with lines kept under 70 characters.
    Loading the result reproduces the quantized intensities exactly.
    """
    q = np.floor(img.pixels * 255.0 + 0.5).astype(np.uint8)
    magic = "P2" if ascii else "P5"
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    if not ascii:
        return header + q.tobytes()
    out_lines = []
    for row in q:
        line = ""
        for v in row:
            tok = str(int(v))
            if line and len(line) + 1 + len(tok) > 70:
                out_lines.append(line)
                line = tok
            else:
                line = tok if not line else line + " " + tok
        out_lines.append(line)
    return header + ("\n".join(out_lines) + "\n").encode("ascii")

"""Binary PGM (P5) images and a flat coefficient container."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .transform import Channel, CoefficientStack

__all__ = [
    "write_pgm",
    "read_pgm",
    "to_uint16",
    "write_png",
    "save_coefficients",
    "load_coefficients",
]

MAXVAL = 65535
_MAGIC = b"SHCF"


def to_uint16(img, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    """Affine map of ``[lo, hi]`` (default: data range) onto ``[0, 65535]``."""
    a = np.asarray(img, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("image contains non-finite values")
    lo = float(a.min()) if lo is None else lo
    hi = float(a.max()) if hi is None else hi
    if hi <= lo:
        return np.zeros(a.shape, dtype=np.uint16)
    q = np.rint((np.clip(a, lo, hi) - lo) / (hi - lo) * MAXVAL)
    return q.astype(np.uint16)


def write_pgm(path, img, lo: float | None = None, hi: float | None = None) -> tuple[float, float]:
    """Write a 16-bit P5 file; returns the ``(lo, hi)`` used for scaling.

    The range is stored in a comment line so :func:`read_pgm` can undo the
    quantisation.
    """
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("PGM images are two-dimensional")
    lo = float(a.min()) if lo is None else float(lo)
    hi = float(a.max()) if hi is None else float(hi)
    q = to_uint16(a, lo, hi)
    h, w = q.shape
    header = f"P5\n# range {lo!r} {hi!r}\n{w} {h}\n{MAXVAL}\n".encode("ascii")
    Path(path).write_bytes(header + q.astype(">u2").tobytes())
    return lo, hi


def _tokens(buf: bytes):
    """Yield header tokens and the offset after each, skipping comments."""
    i, n = 0, len(buf)
    comments = []
    while True:
        while i < n and buf[i:i + 1].isspace():
            i += 1
        if i < n and buf[i:i + 1] == b"#":
            j = buf.find(b"\n", i)
            j = n if j < 0 else j
            comments.append(buf[i + 1:j].decode("ascii", "replace").strip())
            i = j + 1
            continue
        j = i
        while j < n and not buf[j:j + 1].isspace():
            j += 1
        yield buf[i:j], j, comments
        i = j


def read_pgm(path, raw: bool = False) -> np.ndarray:
    """Read a binary PGM (8- or 16-bit).

    Unless ``raw`` is set, values are mapped back to the range recorded by
    :func:`write_pgm` (or to ``[0, 1]`` for foreign files).
    """
    buf = Path(path).read_bytes()
    it = _tokens(buf)
    magic, _, _ = next(it)
    if magic != b"P5":
        raise ValueError(f"not a binary PGM file: {path}")
    w_tok, _, _ = next(it)
    h_tok, _, _ = next(it)
    m_tok, end, comments = next(it)
    w, h, maxval = int(w_tok), int(h_tok), int(m_tok)
    if not 0 < maxval <= MAXVAL:
        raise ValueError(f"invalid PGM maxval {maxval}")
    dtype = ">u2" if maxval > 255 else "u1"
    start = end + 1
    count = w * h
    data = np.frombuffer(buf, dtype=dtype, count=count, offset=start).reshape(h, w)
    if raw:
        return data.astype(np.int64)
    lo, hi = 0.0, 1.0
    for c in comments:
        parts = c.split()
        if len(parts) == 3 and parts[0] == "range":
            lo, hi = float(parts[1]), float(parts[2])
    return lo + data.astype(np.float64) / maxval * (hi - lo)


def write_png(path, img) -> None:
    """8-bit greyscale PNG via Pillow (optional dependency)."""
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("PNG output needs Pillow; use PGM instead") from exc
    q = (to_uint16(img) >> 8).astype(np.uint8)
    Image.fromarray(q, mode="L").save(path, format="PNG")


def save_coefficients(path, stack: CoefficientStack) -> None:
    """Container: magic, header length, JSON header, complex128 LE payload."""
    C, M, _ = stack.coeffs.shape
    header = json.dumps({
        "M": M,
        "dtype": "complex128-le",
        "channels": [ch.to_dict() for ch in stack.channels],
    }, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(stack.coeffs, dtype="<c16").tobytes())


def load_coefficients(path) -> CoefficientStack:
    buf = Path(path).read_bytes()
    if buf[:4] != _MAGIC:
        raise ValueError(f"not a coefficient container: {path}")
    (hlen,) = struct.unpack("<Q", buf[4:12])
    header = json.loads(buf[12:12 + hlen].decode("utf-8"))
    M = header["M"]
    channels = [Channel(**c) for c in header["channels"]]
    data = np.frombuffer(buf, dtype="<c16", offset=12 + hlen)
    if data.size != len(channels) * M * M:
        raise ValueError("coefficient payload size does not match header")
    return CoefficientStack(channels, data.reshape(len(channels), M, M).astype(np.complex128))

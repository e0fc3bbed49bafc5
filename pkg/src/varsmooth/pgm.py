"""Greyscale PGM (P2 ascii / P5 binary) reading and writing."""

import re

import numpy as np

from .spaces import BlockVector


class FormatError(ValueError):
    """Malformed or truncated PGM data."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


_WS = b" \t\r\n\v\f"


def _tokens(data, start, count):
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the last one.
    """
    out = []
    i = start
    n = len(data)
    while len(out) < count:
        while i < n and data[i] in _WS:
            i += 1
        if i >= n:
            raise FormatError("unexpected end of header", i)
        if data[i] == ord("#"):
            while i < n and data[i] not in b"\r\n":
                i += 1
            continue
        j = i
        while j < n and data[j] not in _WS and data[j] != ord("#"):
            j += 1
        out.append((data[i:j], i))
        i = j
    return out, i


def _int(token, offset, what):
    try:
        value = int(token)
    except ValueError:
        raise FormatError(f"bad {what} {token!r}", offset) from None
    return value


def parse_pgm(data):
    """Decode PGM bytes into a float array scaled to [0, 1]."""
    if len(data) < 2 or data[:2] not in (b"P2", b"P5"):
        raise FormatError(f"unknown magic number {bytes(data[:2])!r}", 0)
    magic = data[:2]
    toks, pos = _tokens(data, 2, 3)
    width = _int(toks[0][0], toks[0][1], "width")
    height = _int(toks[1][0], toks[1][1], "height")
    maxval = _int(toks[2][0], toks[2][1], "maxval")
    if width < 1 or height < 1:
        raise FormatError("image dimensions must be positive", toks[0][1])
    if not 0 < maxval < 65536:
        raise FormatError(f"maxval {maxval} out of range", toks[2][1])
    count = width * height
    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WS:
            raise FormatError("missing whitespace after maxval", pos)
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(data) - pos < need:
            raise FormatError(f"truncated payload: need {need} bytes, have {len(data) - pos}", len(data))
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.float64)
        starts = pos + np.arange(count) * dtype.itemsize
    else:
        fields = [(m.group(), pos + m.start()) for m in re.finditer(rb"\S+", data[pos:])]
        if len(fields) < count:
            raise FormatError(f"truncated payload: need {count} samples, have {len(fields)}", len(data))
        raw = np.array([_int(tok, off, "sample") for tok, off in fields[:count]], dtype=np.float64)
        starts = [off for _, off in fields[:count]]
    out_of_range = (raw > maxval) | (raw < 0)
    if out_of_range.any():
        bad = int(np.argmax(out_of_range))
        raise FormatError(f"sample {int(raw.flat[bad])} outside [0, {maxval}]", int(starts[bad]))
    return raw.reshape(height, width) / maxval


def load_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    return BlockVector(parse_pgm(data))


def encode_pgm(img, binary=True, maxval=255):
    arr = img.blocks[0] if isinstance(img, BlockVector) else np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"PGM images are 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    q = np.rint(np.clip(arr, 0.0, 1.0) * maxval).astype(np.int64)
    h, w = arr.shape
    if binary:
        header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
        dtype = ">u2" if maxval > 255 else "u1"
        return header + q.astype(dtype).tobytes()
    lines = [f"P2\n{w} {h}\n{maxval}"]
    lines.extend(" ".join(str(v) for v in row) for row in q)
    return ("\n".join(lines) + "\n").encode("ascii")


def save_pgm(img, path, binary=True):
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img, binary=binary))

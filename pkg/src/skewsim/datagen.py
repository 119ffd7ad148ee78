"""Workload generation and serialization.

Streams are (key, value) arrays of unsigned 64-bit integers. Zipf sampling
uses vectorized rejection-inversion so large key domains need no CDF table.
Rank-to-key assignment is a seeded permutation of the domain, so the hot
key (and therefore its routing destination) moves with the seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"SKTP"
FORMAT_VERSION = 1
_MAX_PERM_DOMAIN = 1 << 24  # permutation table kept in memory


class DatasetError(ValueError):
    pass


@dataclass
class TupleStream:
    keys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.keys = np.ascontiguousarray(self.keys, dtype=np.uint64)
        self.values = np.ascontiguousarray(self.values, dtype=np.uint64)
        if self.keys.shape != self.values.shape:
            raise DatasetError("keys and values must have equal length")

    def __len__(self) -> int:
        return len(self.keys)


def _zipf_ranks(n: int, alpha: float, domain: int, rng) -> np.ndarray:
    """Ranks in [1, domain] with P(r) proportional to r**-alpha.

    Rejection-inversion (Hoermann & Derflinger); handles any alpha > 0
    including 1, with O(1) expected draws per sample.
    """
    q = float(alpha)

    def h_integral(x):
        logx = np.log(x)
        if q == 1.0:
            return logx
        return np.expm1((1.0 - q) * logx) / (1.0 - q)

    def h(x):
        return np.exp(-q * np.log(x))

    def h_integral_inv(u):
        if q == 1.0:
            return np.exp(u)
        x = np.log1p(u * (1.0 - q)) / (1.0 - q)
        return np.exp(x)

    hi_x1 = h_integral(np.array(1.5)) - 1.0
    hi_d = h_integral(np.array(domain + 0.5))
    s = 2.0 - float(h_integral_inv(h_integral(np.array(2.5)) - h(np.array(2.0))))

    out = np.empty(n, dtype=np.int64)
    filled = 0
    while filled < n:
        todo = n - filled
        u = hi_d + rng.random(int(todo * 1.1) + 16) * (hi_x1 - hi_d)
        x = h_integral_inv(u)
        k = np.clip(np.floor(x + 0.5), 1, domain)
        accept = (k - x <= s) | (u >= h_integral(k + 0.5) - h(k))
        k = k[accept].astype(np.int64)
        take = min(len(k), todo)
        out[filled:filled + take] = k[:take]
        filled += take
    return out


def gen_zipf(n: int, alpha: float, domain: int, seed: int) -> TupleStream:
    """Zipf(alpha) keys over [0, domain); alpha = 0 is uniform."""
    if domain < 1:
        raise DatasetError("domain must be >= 1")
    if alpha < 0:
        raise DatasetError("alpha must be >= 0")
    if domain > _MAX_PERM_DOMAIN:
        raise DatasetError(f"domain above {_MAX_PERM_DOMAIN} is not supported")
    rng = np.random.default_rng(seed)
    if alpha == 0.0:
        keys = rng.integers(0, domain, size=n, dtype=np.uint64)
    else:
        ranks = _zipf_ranks(n, alpha, domain, rng)
        perm = rng.permutation(domain).astype(np.uint64)
        keys = perm[ranks - 1]
    values = rng.integers(0, 1 << 32, size=n, dtype=np.uint64)
    return TupleStream(keys, values)


def gen_single_key(n: int, domain: int, seed: int) -> TupleStream:
    """Every tuple carries one seed-chosen key."""
    rng = np.random.default_rng(seed)
    key = np.uint64(rng.integers(0, domain))
    values = rng.integers(0, 1 << 32, size=n, dtype=np.uint64)
    return TupleStream(np.full(n, key, np.uint64), values)


def gen_evolving(n: int, alpha: float, interval: int, seeds) -> TupleStream:
    """Concatenated Zipf segments of `interval` tuples, one seed each, so
    the hot destination moves from segment to segment."""
    if interval <= 0:
        raise DatasetError("interval must be > 0")
    seeds = list(seeds)
    if not seeds:
        raise DatasetError("seed schedule is empty")
    parts = []
    produced = 0
    i = 0
    while produced < n:
        size = min(interval, n - produced)
        parts.append(gen_zipf(size, alpha, 1 << 20, seeds[i % len(seeds)]))
        produced += size
        i += 1
    return TupleStream(np.concatenate([p.keys for p in parts]),
                       np.concatenate([p.values for p in parts]))


def gen_graph(vertices: int, avg_degree: int, skew_exponent: float,
              seed: int) -> TupleStream:
    """Synthetic power-law in-degree edge stream: keys are source vertices
    (uniform), values are destinations (Zipf over vertices)."""
    if vertices < 1:
        raise DatasetError("vertices must be >= 1")
    n_edges = vertices * avg_degree
    rng = np.random.default_rng(seed)
    src = rng.integers(0, vertices, size=n_edges, dtype=np.uint64)
    if skew_exponent == 0.0:
        dst = rng.integers(0, vertices, size=n_edges, dtype=np.uint64)
    else:
        ranks = _zipf_ranks(n_edges, skew_exponent, vertices, rng)
        perm = rng.permutation(vertices).astype(np.uint64)
        dst = perm[ranks - 1]
    return TupleStream(src, dst)


def hot_key(stream: TupleStream) -> int:
    """Most frequent key of a stream."""
    keys, counts = np.unique(stream.keys, return_counts=True)
    return int(keys[np.argmax(counts)])


# --- serialization ---------------------------------------------------------

_HEADER = struct.Struct("<4sHHQ")  # magic, version, tuple width, count


def save_tuples(stream: TupleStream, path, w_tuple: int = 8) -> None:
    """Binary tuple file: 16-byte header then packed key/value pairs of
    two equal-width fields, w_tuple bytes per tuple, little-endian."""
    field_bytes = w_tuple // 2
    if w_tuple not in (2, 4, 8, 16):
        raise DatasetError("w_tuple must be one of 2, 4, 8, 16")
    limit = 1 << (field_bytes * 8)
    if len(stream) and (int(stream.keys.max()) >= limit
                        or int(stream.values.max()) >= limit):
        raise DatasetError(f"stream does not fit {field_bytes}-byte fields")
    dtype = {1: np.uint8, 2: np.uint16, 4: np.uint32, 8: np.uint64}[field_bytes]
    packed = np.empty((len(stream), 2), dtype=dtype)
    packed[:, 0] = stream.keys.astype(dtype)
    packed[:, 1] = stream.values.astype(dtype)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, w_tuple, len(stream)))
        fh.write(packed.tobytes())


def load_tuples(path) -> TupleStream:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise DatasetError(f"{path}: truncated header")
        magic, version, w_tuple, count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise DatasetError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise DatasetError(f"{path}: unsupported version {version}")
        field_bytes = w_tuple // 2
        dtype = {1: np.uint8, 2: np.uint16, 4: np.uint32, 8: np.uint64}[field_bytes]
        data = np.frombuffer(fh.read(count * w_tuple), dtype=dtype)
        if len(data) != count * 2:
            raise DatasetError(f"{path}: truncated payload")
    data = data.reshape(count, 2)
    return TupleStream(data[:, 0].astype(np.uint64), data[:, 1].astype(np.uint64))


def save_edge_list(stream: TupleStream, path) -> None:
    with open(path, "w") as fh:
        for s, d in zip(stream.keys.tolist(), stream.values.tolist()):
            fh.write(f"{s} {d}\n")


def load_edge_list(path, vertices: int | None = None) -> TupleStream:
    """Parse whitespace-separated 'src dst' lines, one edge per line."""
    srcs, dsts = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DatasetError(f"{path}:{lineno}: expected 'src dst'")
        try:
            s, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise DatasetError(f"{path}:{lineno}: non-integer vertex id") from None
        if s < 0 or d < 0 or (vertices is not None and (s >= vertices or d >= vertices)):
            raise DatasetError(f"{path}:{lineno}: vertex id out of range")
        srcs.append(s)
        dsts.append(d)
    return TupleStream(np.array(srcs, np.uint64), np.array(dsts, np.uint64))

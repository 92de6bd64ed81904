"""Seeded construction of masks, perturbation directions, states and test images.

Random streams use numpy's Philox4x64-10 counter-based bit generator keyed
through ``numpy.random.SeedSequence``. Given the same integer seed, numpy
reproduces the same stream on every platform, which is what makes runs
replayable byte for byte.
"""

from pathlib import Path

import numpy as np

QUANTUM_ALPHABET = np.array([1, -1, 1j, -1j], dtype=complex)

PRESET_IMAGES = ("checker", "disk", "gradient", "from-file")


def make_rng(seed, *key) -> np.random.Generator:
    """Philox generator for ``seed``; extra ``key`` integers select an independent substream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(base_seed, index) -> int:
    """64-bit seed for run ``index`` of an experiment seeded with ``base_seed``."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def random_sign_mask(n, rng) -> np.ndarray:
    """n entries, each independently +1 or -1 with probability 1/2."""
    if n < 1:
        raise ValueError("mask needs at least one pixel")
    return rng.integers(0, 2, size=n).astype(float) * 2.0 - 1.0


def _check_order(order):
    if order < 1 or order & (order - 1):
        raise ValueError(f"Hadamard order must be a power of two, got {order}")


def hadamard_mask(order, row) -> np.ndarray:
    """Row ``row`` of the Sylvester Hadamard matrix of size ``order``.

    Entry j of row k is (-1)**popcount(k & j), which is the closed form of
    the recursion H_2n = [[H, H], [H, -H]].
    """
    _check_order(order)
    if not 0 <= row < order:
        raise ValueError(f"row {row} out of range for order {order}")
    j = np.arange(order, dtype=np.uint64)
    parity = np.bitwise_count(j & np.uint64(row)) & 1
    return 1.0 - 2.0 * parity.astype(float)


class RandomMasks:
    """Random-access sequence of ±1 masks; mask k is drawn from substream k of ``seed``."""

    def __init__(self, n, count, seed):
        if n < 1:
            raise ValueError("mask needs at least one pixel")
        self.n = int(n)
        self.count = int(count)
        self.seed = int(seed)

    def __len__(self):
        return self.count

    def __getitem__(self, k):
        if not 0 <= k < self.count:
            raise IndexError(k)
        return random_sign_mask(self.n, make_rng(self.seed, k))

    def __iter__(self):
        for k in range(self.count):
            yield self[k]


class HadamardMasks:
    """The first ``count`` Hadamard rows of size ``order``.

    Rows are taken in sequential order unless ``seed`` is given, in which case
    a seeded permutation of all rows is used.
    """

    def __init__(self, order, count=None, seed=None, skip_dc=False):
        _check_order(order)
        self.order = int(order)
        rows = np.arange(order)
        if seed is not None:
            rows = make_rng(seed).permutation(order)
        if skip_dc:
            rows = rows[rows != 0]
        if count is not None:
            if count > len(rows):
                raise ValueError(f"only {len(rows)} Hadamard rows available, asked for {count}")
            rows = rows[:count]
        self.rows = rows

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, k):
        return hadamard_mask(self.order, int(self.rows[k]))

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]


def random_perturbation(d, rng) -> np.ndarray:
    """Complex direction with entries drawn uniformly from {1, -1, i, -i}."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    return QUANTUM_ALPHABET[rng.integers(0, 4, size=d)]


def random_oam_state(d, rng, mode="phase-only") -> np.ndarray:
    """Random unit-norm qudit state.

    ``phase-only`` gives equal magnitudes 1/sqrt(d) with uniform random phases,
    matching states written onto a phase-only modulator. ``haar`` draws
    complex Gaussian amplitudes and normalises them.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if mode == "phase-only":
        theta = rng.uniform(0.0, 2.0 * np.pi, size=d)
        return np.exp(1j * theta) / np.sqrt(d)
    if mode == "haar":
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        return v / np.linalg.norm(v)
    raise ValueError(f"unknown state mode {mode!r}")


def oam_labels(d) -> np.ndarray:
    """OAM indices -(d-1)/2 .. (d-1)/2 for odd d."""
    if d < 1 or d % 2 == 0:
        raise ValueError("OAM labels are defined for odd d")
    half = (d - 1) // 2
    return np.arange(-half, half + 1)


def read_pgm(path) -> np.ndarray:
    """Read a plain (P2) or binary (P5) PGM file into a float array of shape (height, width)."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    # header: magic, width, height, maxval; '#' starts a comment
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError(f"{path}: truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ValueError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ValueError(f"{path}: invalid PGM dimensions or maxval")
    n = width * height
    if magic == b"P2":
        try:
            values = np.array(data[pos:].split(), dtype=np.int64)
        except ValueError:
            raise ValueError(f"{path}: non-integer pixel data") from None
        if values.size < n:
            raise ValueError(f"{path}: expected {n} pixels, found {values.size}")
        pixels = values[:n]
    elif magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos:pos + n * dtype.itemsize]
        if len(raw) < n * dtype.itemsize:
            raise ValueError(f"{path}: truncated PGM raster")
        pixels = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    else:
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    if pixels.min() < 0 or pixels.max() > maxval:
        raise ValueError(f"{path}: pixel values outside [0, {maxval}]")
    return pixels.reshape(height, width).astype(float)


def test_image(preset, width=64, height=64, path=None) -> np.ndarray:
    """Nonnegative procedural object of shape (height, width) with unit norm."""
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    yy, xx = np.mgrid[0:height, 0:width]
    if preset == "checker":
        img = ((xx + yy) % 2 == 0).astype(float)
    elif preset == "disk":
        cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
        radius = 0.35 * min(width, height)
        r = np.hypot(yy - cy, xx - cx)
        # bright centre fading toward the rim, zero outside
        img = np.where(r <= radius, 1.0 - 0.5 * r / radius, 0.0)
    elif preset == "gradient":
        img = (xx + 1.0) / width + np.zeros_like(yy, dtype=float)
    elif preset == "from-file":
        if path is None:
            raise ValueError("from-file preset needs a path")
        img = read_pgm(path)
    else:
        raise ValueError(f"unknown image preset {preset!r}; choose from {PRESET_IMAGES}")
    if not np.any(img):
        raise ValueError("image is entirely zero")
    return img / np.linalg.norm(img)


test_image.__test__ = False  # keep pytest from collecting it

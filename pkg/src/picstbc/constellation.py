"""Unit-energy QAM/BPSK alphabets with per-axis Gray bit labeling.

Square QAM is built as the product of two PAM axes so that real and
imaginary parts can be searched independently by the group decoders; the
point index equals the integer value of its bit pattern (MSB first, real
axis bits before imaginary axis bits), and bit pattern 0 maps to the most
negative coordinate on each axis.
"""

from dataclasses import dataclass
import math

import numpy as np

SUPPORTED_ORDERS = (2, 4, 16, 64, 256)

_NAME_TO_ORDER = {
    "bpsk": 2,
    "qam4": 4,
    "qam16": 16,
    "qam64": 64,
    "qam256": 256,
}


@dataclass(frozen=True)
class Constellation:
    """Normalized symbol alphabet.

    points[i] is the symbol whose bit pattern has integer value i; the
    first half of the bits select the real-axis level, the rest the
    imaginary-axis level (BPSK has no imaginary bits).
    """
    name: str
    points: tuple
    bits_per_symbol: int
    real_levels: tuple
    imag_levels: tuple

    def __post_init__(self):
        if len(self.points) != 2 ** self.bits_per_symbol:
            raise ValueError("point count must be 2**bits_per_symbol")
        if len(set(self.points)) != len(self.points):
            raise ValueError("points must be distinct")
        energy = np.mean(np.abs(np.asarray(self.points)) ** 2)
        if abs(energy - 1.0) > 1e-12:
            raise ValueError(f"mean symbol energy {energy!r} is not 1")

    @property
    def order(self):
        return len(self.points)

    @property
    def real_bits(self):
        return (len(self.real_levels) - 1).bit_length()

    @property
    def imag_bits(self):
        return (len(self.imag_levels) - 1).bit_length()


@dataclass(frozen=True)
class DifferenceAlphabet:
    """All pairwise differences of constellation points, deduplicated.

    real_values / imag_values are the per-axis difference sets used by the
    per-real-symbol diversity checks.
    """
    values: tuple
    real_values: tuple
    imag_values: tuple


def _gray(level):
    return level ^ (level >> 1)


def _pam_levels(side):
    """Odd-integer PAM grid -side+1 .. side-1 (unnormalized)."""
    return np.arange(-(side - 1), side, 2, dtype=float)


def make_qam(order):
    """Gray-labeled constellation of the given order with unit mean energy.

    Order 2 is BPSK on the real axis; orders 4..256 are square QAM with an
    independent Gray code per axis.
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported order {order}; pick one of {SUPPORTED_ORDERS}")
    if order == 2:
        real_levels = (-1.0, 1.0)
        imag_levels = (0.0,)
        bits = 1
    else:
        side = math.isqrt(order)
        scale = math.sqrt(3.0 / (2.0 * (side * side - 1)))
        real_levels = tuple(_pam_levels(side) * scale)
        imag_levels = real_levels
        bits = int(math.log2(order))

    imag_bits = (len(imag_levels) - 1).bit_length()
    # invert the per-axis Gray map: bit pattern -> level position
    re_from_bits = {_gray(i): i for i in range(len(real_levels))}
    im_from_bits = {_gray(i): i for i in range(len(imag_levels))}
    points = []
    for idx in range(order):
        re = re_from_bits[idx >> imag_bits]
        im = im_from_bits[idx & ((1 << imag_bits) - 1)]
        points.append(complex(real_levels[re], imag_levels[im]))
    name = "bpsk" if order == 2 else f"qam{order}"
    return Constellation(name, tuple(points), bits, real_levels, imag_levels)


def by_name(name):
    """Constellation for a config/CLI name such as 'bpsk' or 'qam64'."""
    try:
        return make_qam(_NAME_TO_ORDER[name.lower()])
    except KeyError:
        raise ValueError(
            f"unknown constellation {name!r}; pick one of {sorted(_NAME_TO_ORDER)}"
        ) from None


def modulate(bits, c):
    """Map a bit sequence to symbols, bits_per_symbol bits per point."""
    bits = np.asarray(bits, dtype=int)
    if bits.size % c.bits_per_symbol:
        raise ValueError(
            f"bit count {bits.size} not divisible by {c.bits_per_symbol}")
    if bits.size == 0:
        return np.zeros(0, dtype=complex)
    weights = 1 << np.arange(c.bits_per_symbol - 1, -1, -1)
    idx = bits.reshape(-1, c.bits_per_symbol) @ weights
    return np.asarray(c.points)[idx]


def demap_hard(symbol, c):
    """Bits of the nearest point; exact ties go to the lowest point index."""
    idx = int(np.argmin(np.abs(np.asarray(c.points) - symbol)))
    return _bits_of(idx, c.bits_per_symbol)


def hard_bits(symbols, c):
    """Vectorized demap_hard over a symbol sequence, flattened bit array."""
    symbols = np.asarray(symbols)
    dist = np.abs(symbols[:, None] - np.asarray(c.points)[None, :])
    idx = np.argmin(dist, axis=1)
    shifts = np.arange(c.bits_per_symbol - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).reshape(-1)


def _bits_of(idx, width):
    return np.array([(idx >> k) & 1 for k in range(width - 1, -1, -1)], dtype=int)


def difference_alphabet(c):
    """Pairwise difference set of the alphabet plus its per-axis splits."""
    pts = np.asarray(c.points)
    diffs = (pts[:, None] - pts[None, :]).ravel()
    values = _dedup_complex(diffs)
    real_values = _dedup_real(np.subtract.outer(c.real_levels, c.real_levels).ravel())
    imag_values = _dedup_real(np.subtract.outer(c.imag_levels, c.imag_levels).ravel())
    return DifferenceAlphabet(values, real_values, imag_values)


def _dedup_real(vals):
    seen = {}
    for v in vals:
        seen.setdefault(round(float(v), 12), float(v))
    return tuple(seen[k] for k in sorted(seen))


def _dedup_complex(vals):
    seen = {}
    for v in vals:
        key = (round(v.real, 12), round(v.imag, 12))
        seen.setdefault(key, complex(v))
    return tuple(seen[k] for k in sorted(seen))

"""Real equivalent channel of the layered code and its column grouping.

Stacking the received block column-wise as (Re y_n; Im y_n) per receive
antenna and the frame as (Re s; Im s) turns Y = sqrt(rho/mu) X(s) H + W
into a real linear model y = sqrt(rho/mu) Heq x + w.  Heq is 2TN x 2L and
splits into 4P column blocks of width M/2 (one per layer vector, real
parts first), which is exactly the grouping the PIC decoders use.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class EquivalentRealChannel:
    """2TN x 2L real matrix h_eq plus the spec that fixes its column order.

    Columns run over (s^1_1,R .. s^1_P,R, s^2_1,R .. s^2_P,R) then the
    same list with imaginary parts, each layer contributing M/2 columns.
    """
    h_eq: np.ndarray
    spec: object
    n_rx: int

    @property
    def column_order(self):
        half = self.spec.half
        labels = []
        for part in ("R", "I"):
            for i in (1, 2):
                for p in range(1, self.spec.p + 1):
                    labels += [f"s^{i}_{p},{part}[{k}]" for k in range(half)]
        return tuple(labels)


def _layer_block(vec, p, half, rows):
    """(rows x half) block: diag(vec) starting at row p-1, zeros elsewhere."""
    out = np.zeros((rows, half))
    idx = np.arange(half)
    out[p - 1 + idx, idx] = vec
    return out


def build_equivalent_channel(spec, h):
    """Real equivalent channel for channel matrix h (M x N).

    For one receive antenna the matrix has four block rows (Re/Im of the
    two codeword halves); several antennas stack vertically in antenna
    order.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim == 1:
        h = h[:, None]
    if h.shape[0] != spec.m or h.shape[1] < 1:
        raise ValueError(f"channel must be {spec.m} x N, got {h.shape}")
    half, rows = spec.half, spec.t // 2
    ta, tb = spec.theta_a, spec.theta_b
    per_antenna = []
    for n in range(h.shape[1]):
        h1, h2 = h[:half, n], h[half:, n]
        b = {
            (1, "R"): [_layer_block(h1.real, p, half, rows) for p in range(1, spec.p + 1)],
            (2, "R"): [_layer_block(h2.real, p, half, rows) for p in range(1, spec.p + 1)],
            (1, "I"): [_layer_block(h1.imag, p, half, rows) for p in range(1, spec.p + 1)],
            (2, "I"): [_layer_block(h2.imag, p, half, rows) for p in range(1, spec.p + 1)],
        }

        def row_block(c1, s1, c2, s2, c3, s3, c4, s4):
            # column order: (i=1 layers, i=2 layers) x (real then imag)
            blocks = [s1 * blk @ ta for blk in b[c1]]
            blocks += [s2 * blk @ ta for blk in b[c2]]
            blocks += [s3 * blk @ tb for blk in b[c3]]
            blocks += [s4 * blk @ tb for blk in b[c4]]
            return blocks

        per_antenna.append(np.block([
            row_block((1, "R"), 1, (2, "R"), 1, (1, "I"), -1, (2, "I"), -1),
            row_block((2, "R"), 1, (1, "R"), -1, (2, "I"), 1, (1, "I"), -1),
            row_block((1, "I"), 1, (2, "I"), 1, (1, "R"), 1, (2, "R"), 1),
            row_block((2, "I"), 1, (1, "I"), -1, (2, "R"), -1, (1, "R"), 1),
        ]))
    return EquivalentRealChannel(np.vstack(per_antenna), spec, h.shape[1])


def stack_received(y):
    """(Re y_n; Im y_n) per antenna column, concatenated over antennas."""
    y = np.asarray(y, dtype=complex)
    if y.ndim == 1:
        y = y[:, None]
    return np.concatenate([np.concatenate([y[:, n].real, y[:, n].imag])
                           for n in range(y.shape[1])])


def stack_symbols(frame):
    """(Re s; Im s) of a complex frame."""
    frame = np.asarray(frame, dtype=complex)
    return np.concatenate([frame.real, frame.imag])


def unstack_symbols(x):
    """Inverse of stack_symbols."""
    x = np.asarray(x, dtype=float)
    l = x.size // 2
    return x[:l] + 1j * x[l:]


def default_grouping(spec):
    """4P consecutive groups of M/2 real-symbol indices (0-based)."""
    half = spec.half
    return tuple(tuple(range(g * half, (g + 1) * half))
                 for g in range(4 * spec.p))


def matrix_of(h_eq):
    """Accept either an EquivalentRealChannel or a bare matrix."""
    return h_eq.h_eq if isinstance(h_eq, EquivalentRealChannel) else np.asarray(h_eq, float)


def permuted_view(h_eq, spec):
    """Two-layer staircase rearrangement of the equivalent channel.

    Column blocks are reordered to (1,3,5,7,2,4,6,8) and rows regrouped so
    the matrix becomes a staircase of 2 x M blocks built from single
    channel coefficients times transform rows; the rows coming from the
    imaginary part of the second codeword half pick up a sign flip.  Only
    defined for P=2 with one receive antenna; used by the verifier and for
    inspection, not on the decoding path.
    """
    if spec.p != 2:
        raise ValueError("permuted view is defined for P=2 only")
    mat = matrix_of(h_eq)
    t2 = spec.t // 2
    if mat.shape != (2 * spec.t, 2 * spec.l):
        raise ValueError("need the single-receive-antenna equivalent channel")
    half = spec.half
    row_order, row_sign = [], []
    for j in list(range(half)) + [t2 - 1]:
        for section, sign in ((0, 1), (1, 1), (2, 1), (3, -1)):
            row_order.append(section * t2 + j)
            row_sign.append(sign)
    col_order = []
    for g in (0, 2, 4, 6, 1, 3, 5, 7):
        col_order += list(range(g * half, (g + 1) * half))
    return np.asarray(row_sign)[:, None] * mat[np.ix_(row_order, col_order)]

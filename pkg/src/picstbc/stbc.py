"""Layered space-time block encoder driven by two real linear transforms.

A frame of L = P*M complex symbols is split into 2P layer vectors of
length M/2; real parts are rotated by theta_a, imaginary parts by
theta_b, each rotated layer is written down a diagonal of one of two
half-size matrices C1, C2, and the T x M codeword is assembled from the
2x2 block pattern

    A = [[C1_R, C2_R], [-C2_R, C1_R]],  B = [[C1_I, C2_I], [C2_I, -C1_I]],

transmitted as A + jB with T = M + 2P - 2.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

ROTATION_ANGLE_DEFAULT = 1.02

# Orthonormality slack for transforms quoted to 3 decimals.
TRUNCATED_THETA_TOL = 5e-3


def rotation_2x2(alpha):
    """Planar rotation [[cos a, sin a], [-sin a, cos a]]."""
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, s], [-s, c]])


def theta_3x3():
    """The published 3x3 real transform, kept at its 3-decimal precision.

    Entry (2,1) is +0.326: the variant with -0.326 that appears in one
    rendering of the matrix is not close to orthonormal and breaks the
    construction, so the sign consistent with orthonormality is used.
    """
    return np.array([
        [0.745, -0.582, -0.326],
        [0.326, 0.745, -0.582],
        [0.582, 0.326, 0.745],
    ])


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """Static description of one code: antennas m, layers p, transforms.

    theta_a and theta_b are (m/2 x m/2) with orthonormal columns within
    theta_tol (relaxed for transforms quoted to limited precision).
    """
    m: int
    p: int
    theta_a: np.ndarray
    theta_b: np.ndarray
    theta_tol: float = 1e-9

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise ValueError("m must be even and >= 2")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        half = self.m // 2
        for name in ("theta_a", "theta_b"):
            th = np.array(getattr(self, name), dtype=float)
            if th.shape != (half, half):
                raise ValueError(f"{name} must be {half}x{half}, got {th.shape}")
            if not np.all(np.isfinite(th)):
                raise ValueError(f"{name} has non-finite entries")
            dev = np.linalg.norm(th.T @ th - np.eye(half))
            if dev > self.theta_tol:
                raise ValueError(
                    f"{name} is not orthonormal within {self.theta_tol:g}"
                    f" (deviation {dev:.3e})")
            th.setflags(write=False)
            object.__setattr__(self, name, th)

    @property
    def half(self):
        return self.m // 2

    @property
    def t(self):
        """Block length."""
        return self.m + 2 * self.p - 2

    @property
    def l(self):
        """Complex symbols per codeword."""
        return self.p * self.m


def default_spec(m, p, theta_a=None, theta_b=None):
    """CodeSpec with the published transforms for m in {2, 4, 6}.

    m=2 uses the trivial 1x1 transform, m=4 the 1.02 rad rotation, m=6
    the 3-decimal 3x3 transform.  Larger m needs explicit transforms.
    """
    if theta_a is None:
        if m == 2:
            theta_a = np.eye(1)
        elif m == 4:
            theta_a = rotation_2x2(ROTATION_ANGLE_DEFAULT)
        elif m == 6:
            theta_a = theta_3x3()
        else:
            raise ValueError(
                f"no built-in transform for m={m}; supply theta_a/theta_b")
    if theta_b is None:
        theta_b = theta_a
    # exact rotations get the strict tolerance; transforms quoted to a few
    # decimals (the published 3x3) fall back to the truncation slack
    dev = max(
        np.linalg.norm(np.asarray(t, float).T @ np.asarray(t, float)
                       - np.eye(m // 2))
        for t in (theta_a, theta_b))
    tol = 1e-9 if dev <= 1e-9 else TRUNCATED_THETA_TOL
    return CodeSpec(m, p, theta_a, theta_b, theta_tol=tol)


def code_rate(spec):
    """Symbols per channel use, exact: MP / (M + 2P - 2)."""
    return Fraction(spec.m * spec.p, spec.t)


def power_normalizer(spec):
    """Mean of ||codeword||_F^2 / T under unit-energy symbols: 2L / T."""
    return 2.0 * spec.l / spec.t


def partition_symbols(frame, spec):
    """Split a length-L frame into the 2P layer vectors.

    Returns a pair (one entry per half i=1,2) of tuples of length-M/2
    vectors; concatenating them in (i, p) order restores the frame.
    """
    frame = np.asarray(frame, dtype=complex)
    if frame.shape != (spec.l,):
        raise ValueError(f"frame must have length {spec.l}, got {frame.shape}")
    half = spec.half
    per_side = spec.p * half
    sides = []
    for i in range(2):
        q = i * per_side
        sides.append(tuple(frame[q + pp * half: q + (pp + 1) * half]
                           for pp in range(spec.p)))
    return tuple(sides)


def transform_layers(layers, spec):
    """Apply theta_a to layer real parts and theta_b to imaginary parts."""
    return tuple(
        tuple(spec.theta_a @ v.real + 1j * (spec.theta_b @ v.imag) for v in side)
        for side in layers)


def encode(frame, spec):
    """Codeword matrix (T x M) for one symbol frame.

    The construction is linear over real scalars, so the frame may hold
    arbitrary complex values (used by the difference-codeword checks),
    not only constellation points.
    """
    layers = transform_layers(partition_symbols(frame, spec), spec)
    half = spec.half
    rows = spec.t // 2
    diag = np.arange(half)
    c_halves = []
    for side in layers:
        c = np.zeros((rows, half), dtype=complex)
        for pp, x in enumerate(side):
            c[pp + diag, diag] = x
        c_halves.append(c)
    c1, c2 = c_halves
    a = np.block([[c1.real, c2.real], [-c2.real, c1.real]])
    b = np.block([[c1.imag, c2.imag], [c2.imag, -c1.imag]])
    return a + 1j * b


# --- text-config serialization -------------------------------------------

def parse_theta(token, half):
    """Transform from a config token.

    Accepts 'rot:<alpha>' (half must be 2), 'paper3x3' (half must be 3),
    'identity', or a row-major comma list of half*half floats.
    """
    token = token.strip()
    if token.startswith("rot:"):
        if half != 2:
            raise ValueError("rot:<alpha> is a 2x2 transform")
        return rotation_2x2(float(token[4:]))
    if token == "paper3x3":
        if half != 3:
            raise ValueError("paper3x3 is a 3x3 transform")
        return theta_3x3()
    if token == "identity":
        return np.eye(half)
    vals = [float(v) for v in token.replace(",", " ").split()]
    if len(vals) != half * half:
        raise ValueError(
            f"expected {half * half} entries for a {half}x{half} transform,"
            f" got {len(vals)}")
    return np.array(vals).reshape(half, half)


def spec_from_mapping(mapping):
    """CodeSpec from a dict-like with keys m, p and theta/theta_a/theta_b."""
    m = int(mapping["m"])
    p = int(mapping["p"])
    half = m // 2
    theta_a = theta_b = None
    if "theta" in mapping and mapping["theta"]:
        theta_a = theta_b = parse_theta(mapping["theta"], half)
    if mapping.get("theta_a"):
        theta_a = parse_theta(mapping["theta_a"], half)
    if mapping.get("theta_b"):
        theta_b = parse_theta(mapping["theta_b"], half)
    if theta_a is None and theta_b is None:
        return default_spec(m, p)
    if theta_a is None or theta_b is None:
        raise ValueError("give both theta_a and theta_b, or a shared theta")
    return default_spec(m, p, theta_a, theta_b)


def spec_to_mapping(spec):
    """Flat string mapping that spec_from_mapping round-trips."""
    fmt = lambda th: ",".join(repr(float(v)) for v in th.ravel())
    return {
        "m": str(spec.m),
        "p": str(spec.p),
        "theta_a": fmt(spec.theta_a),
        "theta_b": fmt(spec.theta_b),
    }

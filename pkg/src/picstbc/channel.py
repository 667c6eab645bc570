"""Quasi-static Rayleigh MIMO channel with explicit SNR bookkeeping.

Noise is fixed at unit variance per complex entry; the SNR enters only
through the sqrt(rho/mu) transmit scaling, with mu the code's power
normalizer, so that rho is the average SNR per receive antenna.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SnrPoint:
    """Linear SNR per receive antenna."""
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @classmethod
    def from_db(cls, db):
        return cls(10.0 ** (db / 10.0))

    @property
    def rho_db(self):
        return 10.0 * np.log10(self.rho)


def sample_channel(rng, m, n):
    """m x n matrix of i.i.d. circular complex Gaussians, unit variance."""
    return np.sqrt(0.5) * (rng.standard_normal((m, n))
                           + 1j * rng.standard_normal((m, n)))


def transmit(x, h, snr, mu, rng, add_noise=True):
    """Received block Y = sqrt(rho/mu) X H + W, noise CN(0,1) per entry.

    add_noise=False is the deterministic test hook (rng may then be None).
    """
    x = np.asarray(x)
    h = np.asarray(h)
    if x.ndim != 2 or h.ndim != 2 or x.shape[1] != h.shape[0]:
        raise ValueError(f"dimension mismatch: codeword {x.shape}, channel {h.shape}")
    y = np.sqrt(snr.rho / mu) * (x @ h)
    if add_noise:
        y = y + sample_channel(rng, x.shape[0], h.shape[1])
    return y

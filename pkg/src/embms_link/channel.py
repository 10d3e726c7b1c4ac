"""Channel models: AWGN and independent Rayleigh fading.

Fading draws one matrix per resource element with unit-variance
complex Gaussian entries, so the average received power per antenna
equals the transmit power.  ``apply_channel`` splits transmit power
evenly across layers (the scaling lives here, not in the detector)
and returns both the observations and the effective per-element
matrices the detector should use.

The carrier-to-noise ratio is defined per receive antenna: total
signal power 1 against complex noise variance ``sigma2 = 10**(-cnr_db/10)``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def noise_variance(cnr_db: float) -> float:
    """Complex noise variance for unit received signal power."""
    return float(10.0 ** (-cnr_db / 10.0))


def awgn(shape, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly symmetric complex Gaussian noise of variance ``sigma2``."""
    scale = np.sqrt(sigma2 / 2.0)
    return rng.normal(0.0, scale, shape) + 1j * rng.normal(0.0, scale, shape)


def draw_rayleigh(
    n_re: int, n_rx: int, n_tx: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-element i.i.d. Rayleigh fading matrices, unit average gain."""
    shape = (n_re, n_rx, n_tx)
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2.0)


def apply_channel(
    layers: np.ndarray,
    h: np.ndarray | None,
    cnr_db: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Transmit layer symbols through fading plus noise.

    ``layers`` is (n_tx, n_re) with unit-energy entries; ``h`` is
    (n_re, n_rx, n_tx) or None for the AWGN-only channel.  Returns
    ``(y, h_eff, sigma2)`` where ``y`` is (n_re, n_rx) and ``h_eff``
    includes the 1/sqrt(n_tx) power split, making ``y = h_eff x + n``
    hold with unit-power ``x``.
    """
    layers = np.asarray(layers, dtype=np.complex128)
    if layers.ndim != 2:
        raise ConfigError("layers must be a (n_tx, n_re) array")
    n_tx, n_re = layers.shape
    sigma2 = noise_variance(cnr_db)
    if h is None:
        if n_tx != 1:
            raise ConfigError("the AWGN-only channel carries a single layer")
        h = np.ones((n_re, 1, 1), dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if h.shape[0] != n_re or h.shape[2] != n_tx:
        raise ConfigError(f"channel shape {h.shape} does not match {n_tx}x{n_re} input")
    h_eff = h / np.sqrt(n_tx)
    y = np.einsum("eij,je->ei", h_eff, layers) + awgn((n_re, h.shape[1]), sigma2, rng)
    return y, h_eff, sigma2

"""Linear detection: unbiased MMSE equalization and maximum-ratio combining.

The MMSE filter for ``y = H x + n`` with unit-power layers and noise
variance ``sigma2`` is ``x_hat = (H^H H + sigma2 I)^-1 H^H y``.  The
filter output is biased: conditioned on the transmitted symbol its
mean is scaled by ``mu_l = 1 - sigma2 * (A^-1)_ll`` where
``A = H^H H + sigma2 I``.  Dividing by ``mu_l`` restores an unbiased
observation ``z_l = x_l + e_l`` whose error variance is
``nv_l = (1 - mu_l) / mu_l``, exactly what the demapper expects.
Per-layer post-detection SINR is ``mu_l / (1 - mu_l)``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def mmse_detect(
    y: np.ndarray, h: np.ndarray, sigma2: float
) -> tuple[np.ndarray, np.ndarray]:
    """Equalize per-element MIMO observations.

    ``y`` is (n_re, n_rx), ``h`` is (n_re, n_rx, n_tx) already scaled
    so that layers have unit power.  Returns ``(z, nv)``, each
    (n_re, n_tx): unbiased symbol estimates and their effective noise
    variances.
    """
    y = np.asarray(y, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 3 or y.ndim != 2 or y.shape != h.shape[:2]:
        raise ConfigError(f"mismatched shapes y{y.shape} h{h.shape}")
    if sigma2 <= 0:
        raise ConfigError("noise variance must be positive")
    n_re, n_rx, n_tx = h.shape
    hh = h.conj().transpose(0, 2, 1)
    a = hh @ h + sigma2 * np.eye(n_tx)
    try:
        a_inv = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise ConfigError(f"singular equalization matrix: {exc}") from exc
    x_hat = np.einsum("eij,ej->ei", a_inv @ hh, y)
    mu = 1.0 - sigma2 * np.einsum("eii->ei", a_inv).real
    # mu in (0, 1) for any finite channel; numerical guard keeps nv positive
    mu = np.clip(mu, 1e-12, 1.0 - 1e-12)
    z = x_hat / mu
    nv = (1.0 - mu) / mu
    return z, nv


def mrc_combine(
    y: np.ndarray, h: np.ndarray, sigma2: float
) -> tuple[np.ndarray, np.ndarray]:
    """Maximum-ratio combining for a single spatial layer.

    ``h`` is (n_re, n_rx) or (n_re, n_rx, 1).  Returns flat
    ``(z, nv)`` of length n_re; MRC is exactly the one-column MMSE
    equalizer, implemented directly for speed.
    """
    y = np.asarray(y, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim == 3:
        if h.shape[2] != 1:
            raise ConfigError("maximum-ratio combining requires a single layer")
        h = h[:, :, 0]
    if y.shape != h.shape:
        raise ConfigError(f"mismatched shapes y{y.shape} h{h.shape}")
    gain = np.sum(np.abs(h) ** 2, axis=1)
    if np.any(gain == 0):
        raise ConfigError("zero channel gain at some resource elements")
    z = np.sum(h.conj() * y, axis=1) / gain
    nv = sigma2 / gain
    return z, nv

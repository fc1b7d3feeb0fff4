"""Closed-form accuracy prediction for both signaling schemes.

The estimated complex gain of element v is its true value plus a complex
Gaussian error term.  Given each error's variance and its correlation
with the reference element's error, the gain and phase mismatch RMSEs
follow in closed form (a high-SNR approximation: amplitude^2/variance
must be large for the expansion to hold).  The orthogonal scheme has
equal, uncorrelated error terms; the cyclic-shift scheme gets its error
statistics from the matched-filter window overlap and the equalizer.
"""

from dataclasses import dataclass

import numpy as np

from .codes import aperiodic_autocorrelation
from .errors import DimensionError, NegativeRadicand, OffsetError

DB_PER_NEPER = 10.0 / np.log(10.0)
DEG_PER_RAD = 180.0 / np.pi


@dataclass(frozen=True)
class NoiseStats:
    """Per-element error variances and correlation of each error with element 1's.

    ``variances`` has one entry per element; ``correlations`` has one
    entry per non-reference element (v = 2..V), each in [-1, 1].
    """

    variances: np.ndarray
    correlations: np.ndarray

    def __post_init__(self):
        var = np.asarray(self.variances, dtype=np.float64)
        rho = np.asarray(self.correlations, dtype=np.float64)
        if var.ndim != 1 or rho.shape != (max(var.size - 1, 0),):
            raise DimensionError("need V variances and V-1 correlations")
        if np.any(var < 0):
            raise DimensionError("variances must be nonnegative")
        if np.any(np.abs(rho) > 1.0 + 1e-12):
            raise DimensionError("correlation coefficients cannot exceed 1 in magnitude")
        object.__setattr__(self, "variances", var)
        object.__setattr__(self, "correlations", np.clip(rho, -1.0, 1.0))

    @property
    def n_elements(self):
        return self.variances.size


@dataclass(frozen=True)
class TheoryPoint:
    """Predicted per-element mismatch RMSEs for elements 2..V."""

    gain_rmse_db: np.ndarray
    phase_rmse_deg: np.ndarray


def oma_noise_stats(noise_var, n_elements):
    """Orthogonal codes pass the receiver noise through unchanged and uncorrelated."""
    if noise_var < 0:
        raise DimensionError("noise variance must be nonnegative")
    return NoiseStats(
        variances=np.full(n_elements, float(noise_var)),
        correlations=np.zeros(max(n_elements - 1, 0)),
    )


def csms_peak_noise_cov(code, n_elements, noise_var, offsets=None):
    """Covariance of the raw correlation-peak noise for consecutive offsets.

    Adjacent peak windows share all but one sample of the noise stream,
    so entry (y, z) is noise_var times the code's aperiodic
    autocorrelation at lag |z - y|.  Only consecutive offsets
    (0, 1, ..., V-1) are supported; anything else raises ``OffsetError``
    because the window-overlap bookkeeping assumes unit spacing.
    """
    code = np.asarray(code)
    if n_elements > code.size:
        raise DimensionError(f"{n_elements} elements exceed code length {code.size}")
    if offsets is not None and list(offsets) != list(range(n_elements)):
        raise OffsetError("peak-noise covariance requires consecutive offsets 0..V-1")
    lags = np.array([aperiodic_autocorrelation(code, k) for k in range(n_elements)])
    idx = np.abs(np.subtract.outer(np.arange(n_elements), np.arange(n_elements)))
    return float(noise_var) * lags[idx]


def csms_gain_noise_stats(eq, peak_cov):
    """Error statistics after the equalizer: variances and reference correlations.

    Propagates the peak-noise covariance through the structured inverse
    on both sides; the diagonal gives each element's error variance and
    the first column gives the correlation with the reference element.
    """
    peak_cov = np.asarray(peak_cov)
    v = eq.n_elements
    if peak_cov.shape != (v, v):
        raise DimensionError(f"covariance shape {peak_cov.shape} != ({v}, {v})")
    inv = eq.as_matrix()
    cov = inv @ peak_cov @ inv
    variances = np.diag(cov).copy()
    if v == 1:
        return NoiseStats(variances=variances, correlations=np.zeros(0))
    scale = np.sqrt(variances[1:] * variances[0])
    correlations = np.divide(cov[1:, 0], scale, out=np.zeros(v - 1), where=scale > 0)
    return NoiseStats(variances=variances, correlations=correlations)


def gain_rmse_theory(amp_v, amp_1, var_v, var_1, rho, phase_v=0.0, phase_1=0.0):
    """Predicted RMSE (dB) of one element's gain-mismatch estimate.

    Treats the squared normalized magnitudes as correlated Gaussians
    (their exact means and variances) and expands the log of their
    ratio; accurate when both amp^2/var ratios are large.
    """
    snr_inv_1 = var_1 / amp_1**2
    snr_inv_v = var_v / amp_v**2
    mu_1 = snr_inv_1 + 1.0
    mu_v = snr_inv_v + 1.0
    s1_sq = snr_inv_1**2 + 2.0 * snr_inv_1
    sv_sq = snr_inv_v**2 + 2.0 * snr_inv_v
    cosine = np.cos(phase_1 - phase_v)
    cross = rho * np.sqrt(var_1 * var_v) / (amp_1 * amp_v)
    # Covariance of the two squared normalized magnitudes (the correlation
    # coefficient times both standard deviations, kept as a product so the
    # zero-noise limit stays finite).
    sq_mag_cov = (1.0 + snr_inv_1 + snr_inv_v
                  + 2.0 * cross * cosine
                  + snr_inv_1 * snr_inv_v * (0.5 + 0.625 * rho**2)
                  - mu_1 * mu_v)
    bias = mu_v / mu_1 + s1_sq * mu_v / mu_1**3 - sq_mag_cov / mu_1**2 - 1.0
    variance = (s1_sq * mu_v**2 / mu_1**4 + sv_sq / mu_1**2
                - 2.0 * sq_mag_cov * mu_v / mu_1**3)
    return DB_PER_NEPER * np.sqrt(variance + bias**2)


def phase_rmse_theory(amp_v, amp_1, phase_v, phase_1, var_v, var_1, rho):
    """Predicted RMSE (degrees) of one element's phase-mismatch estimate.

    Raises ``NegativeRadicand`` when the correlation term overwhelms the
    variance terms, which only happens far outside the high-SNR regime.
    """
    cosine = np.cos(phase_1 - phase_v)
    cross = rho * np.sqrt(var_1 * var_v) * cosine
    radicand = (var_v / (2.0 * amp_v**2) + var_1 / (2.0 * amp_1**2)
                - 2.0 * cross / (2.0 * amp_v * amp_1 + cross))
    if radicand < 0:
        raise NegativeRadicand(
            f"phase error variance {radicand} < 0: inputs outside the model's regime")
    return DEG_PER_RAD * np.sqrt(radicand)


def theory_point(gains, stats):
    """Per-element RMSE predictions for elements 2..V under the given statistics."""
    if len(gains) != stats.n_elements:
        raise DimensionError(f"{len(gains)} gains for {stats.n_elements} noise entries")
    if len(gains) < 2:
        raise DimensionError("need at least two elements")
    amp, phs = gains.amplitudes, gains.phases
    var = stats.variances
    gain_db = np.array([
        gain_rmse_theory(amp[v], amp[0], var[v], var[0],
                         stats.correlations[v - 1], phs[v], phs[0])
        for v in range(1, len(gains))
    ])
    phase_deg = np.array([
        phase_rmse_theory(amp[v], amp[0], phs[v], phs[0], var[v], var[0],
                          stats.correlations[v - 1])
        for v in range(1, len(gains))
    ])
    return TheoryPoint(gain_rmse_db=gain_db, phase_rmse_deg=phase_deg)


def average_rmse(values):
    """Element-averaged RMSE: plain mean of the per-element RMSE values."""
    values = np.asarray(values)
    if values.size < 1:
        raise DimensionError("nothing to average")
    return float(np.mean(values))

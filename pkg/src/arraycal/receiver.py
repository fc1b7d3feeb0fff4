"""Correlation-peak extraction, zero-forcing equalization, mismatch readout."""

from dataclasses import dataclass

import numpy as np

from .codes import periodic_autocorrelation
from .channel import validate_offsets
from .errors import DimensionError, ReferenceZero, SingularError


def oma_estimate(code_matrix, window):
    """Per-element gain estimates from one receive window of orthogonal codes.

    With orthonormal columns the correlation peaks C.T @ window are
    already unbiased gain estimates; no equalizer is needed.
    """
    code_matrix = np.asarray(code_matrix)
    window = np.asarray(window)
    if window.ndim != 1 or window.size != code_matrix.shape[0]:
        raise DimensionError(
            f"window length {window.size} != code length {code_matrix.shape[0]}")
    return code_matrix.T @ window


def csms_peaks(code, offsets, stream):
    """Single-filter correlation peaks recorded at the per-element epochs.

    peak[v] = sum_k code[k] * stream[k + offsets[v]]: one matched filter
    output, read offsets[v] samples after the first element's peak.
    """
    code = np.asarray(code)
    stream = np.asarray(stream)
    length = code.size
    offsets = validate_offsets(offsets, length)
    if stream.size < length + offsets[-1]:
        raise DimensionError(
            f"stream of {stream.size} samples too short for code length {length} "
            f"with largest offset {offsets[-1]}")
    windows = np.lib.stride_tricks.sliding_window_view(stream, length)[offsets]
    return windows @ code


def build_correlation_matrix(code, offsets):
    """Cross-correlation matrix of the shifted codes at the peak epochs.

    Entry (y, z) is the periodic autocorrelation of the code at lag
    offsets[z] - offsets[y].  For an m-sequence this is 1 on the diagonal
    and -1/L everywhere else, independent of the offsets chosen.
    """
    code = np.asarray(code)
    offsets = validate_offsets(offsets, code.size)
    lags = np.array([periodic_autocorrelation(code, lag) for lag in range(code.size)])
    diffs = np.subtract.outer(offsets, offsets) % code.size
    # autocorrelation is symmetric in the lag, so (z - y) and (y - z) agree
    return lags[diffs]


@dataclass(frozen=True)
class ZfEqualizer:
    """Two-coefficient inverse of the m-sequence peak correlation matrix.

    The inverse has constant diagonal ``diag_coeff`` and constant
    off-diagonal ``cross_coeff``, so applying it costs O(V): one shared
    peak sum plus one scaled term per element.
    """

    code_length: int
    n_elements: int
    cross_coeff: float
    diag_coeff: float

    @classmethod
    def for_dimensions(cls, code_length, n_elements):
        l, v = int(code_length), int(n_elements)
        if v < 1:
            raise DimensionError("need at least one element")
        if l - v + 1 <= 0:
            raise SingularError(
                f"correlation matrix is singular for {v} elements on a length-{l} code")
        denom = (l + 1) * (l - v + 1)
        return cls(
            code_length=l,
            n_elements=v,
            cross_coeff=l / denom,
            diag_coeff=l * (l - v + 2) / denom,
        )

    def as_matrix(self):
        v = self.n_elements
        return (self.diag_coeff - self.cross_coeff) * np.eye(v) \
            + self.cross_coeff * np.ones((v, v))


def zf_equalize(peaks, eq):
    """Cancel inter-element interference: equivalent to inverse-matrix times peaks.

    Uses the two-coefficient structure directly: out_v = cross * sum(peaks)
    + (diag - cross) * peak_v.
    """
    peaks = np.asarray(peaks)
    if peaks.shape != (eq.n_elements,):
        raise DimensionError(f"expected {eq.n_elements} peaks, got shape {peaks.shape}")
    total = peaks.sum()
    return eq.cross_coeff * total + (eq.diag_coeff - eq.cross_coeff) * peaks


def wrap_degrees(angle_deg):
    """Wrap angles to (-180, 180] degrees."""
    wrapped = np.mod(np.asarray(angle_deg, dtype=np.float64) + 180.0, 360.0) - 180.0
    return np.where(wrapped == -180.0, 180.0, wrapped)


@dataclass(frozen=True)
class MismatchReport:
    """Relative gain (dB) and phase (degrees) of elements 2..V versus element 1."""

    gain_db: np.ndarray
    phase_deg: np.ndarray

    def __len__(self):
        return self.gain_db.size


def extract_mismatch(estimates):
    """Relative mismatch of every element against the first (reference) element.

    Invariant under any global complex scaling of the estimate vector.
    """
    estimates = np.asarray(estimates)
    if estimates.size < 2:
        raise DimensionError("need at least two elements to form a mismatch")
    ref = estimates[0]
    if ref == 0:
        raise ReferenceZero("reference element estimate is zero")
    return MismatchReport(
        gain_db=20.0 * np.log10(np.abs(estimates[1:]) / np.abs(ref)),
        phase_deg=wrap_degrees(np.degrees(np.angle(estimates[1:]) - np.angle(ref))),
    )

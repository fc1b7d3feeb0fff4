"""Oversampled chip-level waveform model.

Everything downstream works on one sample per chip.  This module exists
to show that the oversampled picture (rectangular chip pulse, chip
matched filter, chip-rate sampling) collapses to that discrete model,
so the rest of the package can stay at chip rate without loss.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class OversampledWaveform:
    """Baseband waveform sampled ``oversample`` times per chip."""

    samples: np.ndarray
    oversample: int
    chip_duration: float = 1.0

    def __post_init__(self):
        if self.oversample < 2:
            raise DimensionError(f"oversample factor must be >= 2, got {self.oversample}")
        if self.samples.size % self.oversample != 0:
            raise DimensionError("sample count is not a multiple of the oversample factor")

    @property
    def n_chips(self):
        return self.samples.size // self.oversample


def synthesize_baseband(code, oversample, chip_duration=1.0):
    """Hold each chip value for ``oversample`` samples (unit-amplitude rectangular pulse).

    The pulse amplitude convention is 1 (not 1/chip_duration); the
    matched filter below normalizes its peak instead, which makes the
    chip-epoch samples equal the chip values exactly.
    """
    code = np.asarray(code)
    if code.size < 1:
        raise DimensionError("empty code")
    return OversampledWaveform(
        samples=np.repeat(code, oversample),
        oversample=int(oversample),
        chip_duration=float(chip_duration),
    )


def chip_matched_filter_and_sample(waveform):
    """Rectangular chip matched filter followed by one sample per chip epoch.

    Convolves with a length-``oversample`` rectangular pulse, scales so a
    chip-epoch sample of an aligned chip reproduces the chip value, and
    samples at the end of each chip interval.  Output length equals the
    chip count of the input.
    """
    f = waveform.oversample
    filtered = np.convolve(waveform.samples, np.ones(f)) / f
    return filtered[f - 1 :: f][: waveform.n_chips]

"""Ground-truth element gains, receiver noise, and link-budget bookkeeping."""

from dataclasses import dataclass

import numpy as np

from .codes import cyclic_shift
from .errors import DimensionError, OffsetError

# dB form of the Boltzmann constant used by the link budget (configurable
# per LinkBudget instance).
BOLTZMANN_DBW_HZ_K = -228.0


@dataclass(frozen=True)
class ElementGains:
    """Per-element complex channel gains: amplitude (linear) and phase (radians)."""

    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.float64)
        p = np.asarray(self.phases, dtype=np.float64)
        if a.shape != p.shape or a.ndim != 1:
            raise DimensionError("amplitudes and phases must be 1-D arrays of equal length")
        if np.any(a <= 0):
            raise DimensionError("amplitudes must be strictly positive")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "phases", p)

    def __len__(self):
        return self.amplitudes.size

    @property
    def w(self):
        """Complex gain vector a_v * exp(j * phase_v)."""
        return self.amplitudes * np.exp(1j * self.phases)

    @classmethod
    def with_random_phases(cls, n_elements, rng, amplitude=1.0):
        """Equal-power gains with phases drawn uniformly from [0, 2*pi)."""
        return cls(
            amplitudes=np.full(n_elements, float(amplitude)),
            phases=rng.uniform(0.0, 2.0 * np.pi, n_elements),
        )


@dataclass(frozen=True)
class LinkBudget:
    """dB-domain link parameters determining the per-element energy-to-noise ratio."""

    eirp_dbw: float
    path_loss_db: float
    g_over_t_dbk: float
    ts_seconds: float
    kb_dbw_hz_k: float = BOLTZMANN_DBW_HZ_K

    def __post_init__(self):
        if self.ts_seconds <= 0:
            raise DimensionError("symbol duration must be positive")

    @classmethod
    def from_dict(cls, d):
        return cls(
            eirp_dbw=float(d["eirp_dbw"]),
            path_loss_db=float(d["path_loss_db"]),
            g_over_t_dbk=float(d["g_over_t_dbk"]),
            ts_seconds=float(d["ts_seconds"]),
            kb_dbw_hz_k=float(d.get("kb_dbw_hz_k", BOLTZMANN_DBW_HZ_K)),
        )


def ev_n0_from_link_budget(lb):
    """Per-element waveform energy over noise density, in dB."""
    return (lb.eirp_dbw - lb.path_loss_db + lb.g_over_t_dbk
            - lb.kb_dbw_hz_k + 10.0 * np.log10(lb.ts_seconds))


def noise_var_from_snr(ev_n0_db, amplitude):
    """Total complex noise variance realizing amplitude^2 / sigma^2 = Ev/N0."""
    if amplitude <= 0:
        raise DimensionError("amplitude must be positive")
    return amplitude**2 / 10.0 ** (ev_n0_db / 10.0)


def complex_awgn(rng, n, noise_var):
    """n draws of circularly-symmetric complex Gaussian noise, E|x|^2 = noise_var.

    Draw order is part of the reproducibility contract: n standard
    normals for the real parts, then n for the imaginary parts, each
    scaled by sqrt(noise_var / 2).
    """
    if noise_var < 0:
        raise DimensionError("noise variance must be nonnegative")
    scale = np.sqrt(noise_var / 2.0)
    return scale * rng.standard_normal(n) + 1j * scale * rng.standard_normal(n)


def synthesize_window_oma(code_matrix, gains, noise_var, rng):
    """One noisy length-L receive window of the orthogonal-code composite signal."""
    code_matrix = np.asarray(code_matrix)
    if code_matrix.ndim != 2 or code_matrix.shape[1] != len(gains):
        raise DimensionError(
            f"code matrix has {code_matrix.shape[1] if code_matrix.ndim == 2 else '?'} columns "
            f"for {len(gains)} elements")
    clean = code_matrix @ gains.w
    return clean + complex_awgn(rng, code_matrix.shape[0], noise_var)


def validate_offsets(offsets, length):
    """Offsets must start at 0, strictly increase, and stay below the code length."""
    offsets = [int(q) for q in offsets]
    if not offsets or offsets[0] != 0:
        raise OffsetError("first offset must be 0")
    if any(b <= a for a, b in zip(offsets, offsets[1:])):
        raise OffsetError(f"offsets must be strictly increasing, got {offsets}")
    if offsets[-1] > length - 1:
        raise OffsetError(f"largest offset {offsets[-1]} exceeds code length - 1 = {length - 1}")
    return offsets


def csms_clean_stream(code, offsets, gains):
    """Noise-free composite stream: periodic extension of the shifted-code sum.

    Length is L + max(offset) so that every element's correlation window
    fits.  Sample k equals sum_v w_v * shifted_code_v[k mod L].
    """
    code = np.asarray(code)
    length = code.size
    offsets = validate_offsets(offsets, length)
    if len(offsets) != len(gains):
        raise DimensionError(f"{len(offsets)} offsets for {len(gains)} elements")
    n_out = length + offsets[-1]
    stream = np.zeros(n_out, dtype=np.complex128)
    w = gains.w
    for v, q in enumerate(offsets):
        shifted = cyclic_shift(code, q)
        stream += w[v] * np.tile(shifted, 2)[:n_out]
    return stream


def synthesize_stream_csms(code, offsets, gains, noise_var, rng):
    """Noisy receive stream for the cyclic-shift scheme.

    Noise is i.i.d. across the whole stream, so the overlap of adjacent
    correlation windows induces the inter-peak noise correlation that
    the accuracy theory accounts for.
    """
    clean = csms_clean_stream(code, offsets, gains)
    return clean + complex_awgn(rng, clean.size, noise_var)

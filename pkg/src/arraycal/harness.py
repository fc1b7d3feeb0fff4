"""Monte-Carlo scenario runner, figure-reproduction grids, CSV reports.

Determinism contract: a report is a pure function of the scenario
configuration.  Every trial draws its noise (and, in per-trial phase
mode, its phases) from a generator seeded by the entropy triple
``[master_seed, point_index, 1 + trial_index]``; the per-point channel
phases come from ``[master_seed, point_index, 0]``.  Trials are
therefore independent of execution order and worker count, and error
sums are reduced in fixed trial order.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import theory as accuracy
from .channel import (ElementGains, LinkBudget, complex_awgn, csms_clean_stream,
                      ev_n0_from_link_budget, noise_var_from_snr)
from .codes import default_taps_for_length, msequence_code, walsh_matrix
from .errors import ConfigError, UnknownFigure
from .receiver import (ZfEqualizer, csms_peaks, extract_mismatch, oma_estimate,
                       wrap_degrees, zf_equalize)

SCHEMES = ("OMA", "CSMS")
PHASE_POLICIES = ("per-point", "per-trial")
DEFAULT_TRIALS = 10_000
DEFAULT_SEED = 1729
STDERR_BATCHES = 25

CSV_COLUMNS = [
    "scheme", "V", "L", "ev_n0_db",
    "gain_rmse_theory_db", "gain_rmse_sim_db", "gain_rmse_sim_stderr",
    "phase_rmse_theory_deg", "phase_rmse_sim_deg", "phase_rmse_sim_stderr",
    "trials", "seed",
]


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario: a scheme, a code, and a grid of operating points.

    Exactly one of ``snr_grid_db`` (fixed element count, swept SNR) and
    ``v_grid`` (fixed SNR, swept element count) must be given.
    """

    scheme: str
    code_length: int
    n_elements: int | None = None
    snr_grid_db: tuple = None
    v_grid: tuple = None
    ev_n0_db: float | None = None
    trials: int = DEFAULT_TRIALS
    master_seed: int = DEFAULT_SEED
    taps: tuple = None
    phase_policy: str = "per-point"
    amplitude_policy: str = "all-ones"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if (self.snr_grid_db is None) == (self.v_grid is None):
            raise ConfigError("exactly one of snr_grid_db / v_grid must be set")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.phase_policy not in PHASE_POLICIES:
            raise ConfigError(f"phase_policy must be one of {PHASE_POLICIES}")
        if self.amplitude_policy != "all-ones":
            raise ConfigError("only the all-ones amplitude policy is supported")
        if self.snr_grid_db is not None:
            object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
            if not self.snr_grid_db:
                raise ConfigError("snr_grid_db is empty")
            if self.n_elements is None:
                raise ConfigError("n_elements is required with snr_grid_db")
            self._check_elements(self.n_elements)
        else:
            object.__setattr__(self, "v_grid", tuple(int(v) for v in self.v_grid))
            if not self.v_grid:
                raise ConfigError("v_grid is empty")
            if self.ev_n0_db is None:
                raise ConfigError("ev_n0_db (or a link budget) is required with v_grid")
            for v in self.v_grid:
                self._check_elements(v)
        if self.taps is not None:
            object.__setattr__(self, "taps", tuple(int(t) for t in self.taps))
            if self.scheme != "CSMS":
                raise ConfigError("taps only apply to the CSMS scheme")
        # Fails here (not mid-run) if the code length is unsupported.
        if self.scheme == "CSMS" and self.taps is None:
            object.__setattr__(self, "taps", default_taps_for_length(self.code_length))
        if self.scheme == "OMA" and self.code_length & (self.code_length - 1) != 0:
            raise ConfigError(f"OMA requires a power-of-two code length, got {self.code_length}")

    def _check_elements(self, v):
        if not 2 <= v <= self.code_length:
            raise ConfigError(
                f"element count {v} must satisfy 2 <= V <= code length {self.code_length}")

    @classmethod
    def from_dict(cls, d):
        """Build from the scenario-file layout (see docs/scenario_schema.json)."""
        d = dict(d)
        known = {"scheme", "code_length", "n_elements", "snr_grid_db", "v_grid", "ev_n0_db",
                 "link_budget", "trials", "master_seed", "taps", "phase_policy",
                 "amplitude_policy"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
        ev_n0_db = d.get("ev_n0_db")
        if "link_budget" in d:
            if ev_n0_db is not None:
                raise ConfigError("give either ev_n0_db or link_budget, not both")
            try:
                lb = LinkBudget.from_dict(d["link_budget"])
            except KeyError as e:
                raise ConfigError(f"link_budget is missing field {e}") from None
            ev_n0_db = ev_n0_from_link_budget(lb)
        try:
            return cls(
                scheme=str(d["scheme"]).upper(),
                code_length=int(d["code_length"]),
                n_elements=None if d.get("n_elements") is None else int(d["n_elements"]),
                snr_grid_db=d.get("snr_grid_db"),
                v_grid=d.get("v_grid"),
                ev_n0_db=None if ev_n0_db is None else float(ev_n0_db),
                trials=int(d.get("trials", DEFAULT_TRIALS)),
                master_seed=int(d.get("master_seed", DEFAULT_SEED)),
                taps=d.get("taps"),
                phase_policy=d.get("phase_policy", "per-point"),
                amplitude_policy=d.get("amplitude_policy", "all-ones"),
            )
        except KeyError as e:
            raise ConfigError(f"scenario file is missing field {e}") from None


@dataclass(frozen=True)
class GridPoint:
    """One operating point of a scenario grid."""

    index: int
    scheme: str
    n_elements: int
    code_length: int
    ev_n0_db: float


def scenario_points(cfg):
    """Enumerate the grid points of a scenario in report order."""
    if cfg.snr_grid_db is not None:
        return [GridPoint(i, cfg.scheme, cfg.n_elements, cfg.code_length, snr)
                for i, snr in enumerate(cfg.snr_grid_db)]
    return [GridPoint(i, cfg.scheme, v, cfg.code_length, cfg.ev_n0_db)
            for i, v in enumerate(cfg.v_grid)]


def rng_stream(master_seed, *key):
    """Deterministic per-purpose generator: entropy is the seed plus the key path."""
    return np.random.default_rng([int(master_seed) & 0xFFFFFFFFFFFFFFFF,
                                  *(int(k) for k in key)])


class _PointContext:
    """Precomputed per-point state shared by every trial at that point."""

    def __init__(self, cfg, point):
        v, l = point.n_elements, point.code_length
        self.point = point
        self.noise_var = noise_var_from_snr(point.ev_n0_db, 1.0)
        phase_rng = rng_stream(cfg.master_seed, point.index, 0)
        self.gains = ElementGains.with_random_phases(v, phase_rng)
        if point.scheme == "OMA":
            self.code_matrix_t = np.ascontiguousarray(walsh_matrix(l, v).T)
            self.offsets = None
            self.code = None
            self.eq = None
        else:
            self.code = msequence_code(l, cfg.taps)
            self.offsets = list(range(v))
            self.eq = ZfEqualizer.for_dimensions(l, v)
            self.code_matrix_t = None
        self._set_gains(self.gains)

    def _set_gains(self, gains):
        self.truth_gain_db = 20.0 * np.log10(gains.amplitudes[1:] / gains.amplitudes[0])
        self.truth_phase_deg = np.degrees(gains.phases[1:] - gains.phases[0])
        if self.point.scheme == "OMA":
            self.clean = self.code_matrix_t.T @ gains.w
        else:
            self.clean = csms_clean_stream(self.code, self.offsets, gains)

    def noise_stats(self):
        if self.point.scheme == "OMA":
            return accuracy.oma_noise_stats(self.noise_var, self.point.n_elements)
        cov = accuracy.csms_peak_noise_cov(self.code, self.point.n_elements, self.noise_var)
        return accuracy.csms_gain_noise_stats(self.eq, cov)


def _trial_errors(ctx, cfg, trial_index):
    """One synthesize -> receive -> extract pass; returns (gain, phase) error arrays."""
    rng = rng_stream(cfg.master_seed, ctx.point.index, 1 + trial_index)
    if cfg.phase_policy == "per-trial":
        ctx._set_gains(ElementGains.with_random_phases(ctx.point.n_elements, rng))
    window = ctx.clean + complex_awgn(rng, ctx.clean.size, ctx.noise_var)
    if ctx.point.scheme == "OMA":
        estimates = ctx.code_matrix_t @ window
    else:
        peaks = csms_peaks(ctx.code, ctx.offsets, window)
        estimates = zf_equalize(peaks, ctx.eq)
    report = extract_mismatch(estimates)
    gain_err = report.gain_db - ctx.truth_gain_db
    phase_err = wrap_degrees(report.phase_deg - ctx.truth_phase_deg)
    return gain_err, phase_err


def run_trial(cfg, point, trial_index):
    """Public single-trial entry point; identical math to the batch runner."""
    return _trial_errors(_PointContext(cfg, point), cfg, trial_index)


def _trial_chunk(cfg, point, start, stop):
    ctx = _PointContext(cfg, point)
    n = stop - start
    v = point.n_elements
    gain_sq = np.empty((n, v - 1))
    phase_sq = np.empty((n, v - 1))
    for i, t in enumerate(range(start, stop)):
        ge, pe = _trial_errors(ctx, cfg, t)
        gain_sq[i] = ge**2
        phase_sq[i] = pe**2
    return gain_sq, phase_sq


def _batch_stderr(sq_errors):
    """Batch-means standard error of the element-averaged RMSE."""
    trials = sq_errors.shape[0]
    n_batches = min(STDERR_BATCHES, trials)
    if n_batches < 2:
        return 0.0
    edges = np.linspace(0, trials, n_batches + 1).astype(int)
    vals = np.array([np.sqrt(sq_errors[a:b].mean(axis=0)).mean()
                     for a, b in zip(edges[:-1], edges[1:])])
    return float(vals.std(ddof=1) / np.sqrt(n_batches))


@dataclass(frozen=True)
class RmseRow:
    """One report row: theory and simulation RMSEs at a single grid point."""

    scheme: str
    n_elements: int
    code_length: int
    ev_n0_db: float
    gain_rmse_theory_db: float
    gain_rmse_sim_db: float
    gain_rmse_sim_stderr: float
    phase_rmse_theory_deg: float
    phase_rmse_sim_deg: float
    phase_rmse_sim_stderr: float
    trials: int
    seed: int

    def as_csv_record(self):
        return [self.scheme, self.n_elements, self.code_length,
                _fmt(self.ev_n0_db),
                _fmt(self.gain_rmse_theory_db), _fmt(self.gain_rmse_sim_db),
                _fmt(self.gain_rmse_sim_stderr),
                _fmt(self.phase_rmse_theory_deg), _fmt(self.phase_rmse_sim_deg),
                _fmt(self.phase_rmse_sim_stderr),
                self.trials, self.seed]


def _fmt(x):
    return repr(float(x))


@dataclass(frozen=True)
class RmseReport:
    """Ordered collection of report rows, writable as CSV."""

    rows: tuple
    comment: str = ""

    def write_csv(self, destination):
        if hasattr(destination, "write"):
            self._write(destination)
        else:
            with open(destination, "w", newline="") as fh:
                self._write(fh)

    def _write(self, fh):
        if self.comment:
            fh.write(f"# {self.comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(row.as_csv_record())

    def to_csv_text(self):
        buf = io.StringIO()
        self._write(buf)
        return buf.getvalue()


def _run_point(cfg, point, workers):
    ctx = _PointContext(cfg, point)
    trials = cfg.trials
    if workers > 1 and trials >= 4 * workers:
        edges = np.linspace(0, trials, workers * 4 + 1).astype(int)
        spans = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_chunk,
                                  [cfg] * len(spans), [point] * len(spans),
                                  [a for a, _ in spans], [b for _, b in spans]))
        gain_sq = np.concatenate([p[0] for p in parts], axis=0)
        phase_sq = np.concatenate([p[1] for p in parts], axis=0)
    else:
        gain_sq, phase_sq = _trial_chunk(cfg, point, 0, trials)

    stats = ctx.noise_stats()
    predicted = accuracy.theory_point(ctx.gains, stats)
    return RmseRow(
        scheme=point.scheme,
        n_elements=point.n_elements,
        code_length=point.code_length,
        ev_n0_db=point.ev_n0_db,
        gain_rmse_theory_db=accuracy.average_rmse(predicted.gain_rmse_db),
        gain_rmse_sim_db=float(np.sqrt(gain_sq.mean(axis=0)).mean()),
        gain_rmse_sim_stderr=_batch_stderr(gain_sq),
        phase_rmse_theory_deg=accuracy.average_rmse(predicted.phase_rmse_deg),
        phase_rmse_sim_deg=float(np.sqrt(phase_sq.mean(axis=0)).mean()),
        phase_rmse_sim_stderr=_batch_stderr(phase_sq),
        trials=cfg.trials,
        seed=cfg.master_seed,
    )


def run_scenario(cfg, workers=1):
    """Run every grid point of a scenario and report theory next to simulation."""
    workers = max(1, int(workers))
    rows = [_run_point(cfg, point, workers) for point in scenario_points(cfg)]
    return RmseReport(rows=tuple(rows))


FIGURE_NAMES = ("fig5", "fig6", "fig7", "fig8")
_SNR_SWEEP = tuple(float(s) for s in range(10, 41, 5))
_SWEEP_FRACTIONS = (0.2, 0.4, 0.6, 0.8, 0.95)


def _fig56_configs(master_seed, trials):
    t = trials or DEFAULT_TRIALS
    layout = [("OMA", 64), ("OMA", 128), ("OMA", 256),
              ("CSMS", 63), ("CSMS", 127), ("CSMS", 255)]
    return [ScenarioConfig(scheme=s, code_length=l, n_elements=50,
                           snr_grid_db=_SNR_SWEEP, trials=t, master_seed=master_seed)
            for s, l in layout]


def _v_sweep(code_length):
    vs = [int(f * code_length) for f in _SWEEP_FRACTIONS] + [code_length]
    if code_length == 511:
        vs.insert(-1, 500)
    return vs


def _fig78_configs(master_seed, trials):
    def t(default):
        return trials or default

    configs = [ScenarioConfig(scheme="OMA", code_length=512, v_grid=(50,),
                              ev_n0_db=30.0, trials=t(DEFAULT_TRIALS),
                              master_seed=master_seed)]
    for l in (127, 255):
        configs.append(ScenarioConfig(scheme="CSMS", code_length=l, v_grid=_v_sweep(l),
                                      ev_n0_db=30.0, trials=t(DEFAULT_TRIALS),
                                      master_seed=master_seed))
    vs511 = _v_sweep(511)
    configs.append(ScenarioConfig(scheme="CSMS", code_length=511,
                                  v_grid=[v for v in vs511 if v <= 204],
                                  ev_n0_db=30.0, trials=t(DEFAULT_TRIALS),
                                  master_seed=master_seed))
    configs.append(ScenarioConfig(scheme="CSMS", code_length=511,
                                  v_grid=[v for v in vs511 if 204 < v <= 408],
                                  ev_n0_db=30.0, trials=t(3_000), master_seed=master_seed))
    configs.append(ScenarioConfig(scheme="CSMS", code_length=511,
                                  v_grid=[v for v in vs511 if v > 408],
                                  ev_n0_db=30.0, trials=t(1_000), master_seed=master_seed))
    return configs


def figure_configs(name, master_seed=DEFAULT_SEED, trials=None):
    """Scenario list behind a figure grid; fig5/fig6 and fig7/fig8 share grids."""
    if name in ("fig5", "fig6"):
        return _fig56_configs(master_seed, trials)
    if name in ("fig7", "fig8"):
        return _fig78_configs(master_seed, trials)
    raise UnknownFigure(f"unknown figure {name!r}; expected one of {FIGURE_NAMES}")


def reproduce_figure(name, master_seed=DEFAULT_SEED, trials=None, workers=1):
    """Run the full grid behind one of the accuracy figures and return the report.

    fig5/fig6: 50 elements, code lengths 64/128/256 (orthogonal) and
    63/127/255 (cyclic-shift), SNR swept 10..40 dB in 5 dB steps.
    fig7/fig8: SNR fixed at 30 dB, element count swept up to the code
    length for lengths 127/255/511, with a 512-chip orthogonal benchmark.
    Gain and phase columns are both always present; the two names in
    each pair map to the same grid.
    """
    configs = figure_configs(name, master_seed, trials)
    rows = []
    for cfg in configs:
        rows.extend(run_scenario(cfg, workers=workers).rows)
    grid_desc = ("V=50, OMA L in {64,128,256}, CSMS L in {63,127,255}, EvN0 10..40 dB step 5"
                 if name in ("fig5", "fig6") else
                 "EvN0=30 dB, OMA benchmark L=512, CSMS L in {127,255,511} with V swept to L")
    return RmseReport(rows=tuple(rows),
                      comment=f"{name}: {grid_desc}; seed={master_seed}")

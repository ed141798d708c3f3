"""Experiment runner: seeded sweeps, table/figure data files, manifests.

Every run writes CSV files plus a ``manifest.json`` holding the config,
its content hash and the SHA-256 of each data file. All randomness flows
through :func:`beamlink.rng.substream` keyed by (purpose, indices,
block), so reruns with the same config and seed produce byte-identical
CSV output and sweep points can be computed in any order.

Monte-Carlo error counting is done in fixed-size trial blocks; block b
of a sweep point always consumes the same substream regardless of how
many blocks the stopping rule ends up needing.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import hadamard

from . import analysis, beamformer, channel, phase_opt, stbc
from .rng import substream

# substream purpose tags
_PURPOSE_FIG1 = 1
_PURPOSE_FIG2 = 2
_PURPOSE_FIG3 = 3
_PURPOSE_BPSK_CHECK = 4
_PURPOSE_CONDITIONAL = 5

TRIAL_BLOCK = 16384

CSV_HEADER = "scheme,modulation,metric,gamma0_db,value,ci_half_width,n_trials"

DEFAULT_SNR_GRID_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)


@dataclass
class ExperimentConfig:
    """Sweep configuration; defaults match the reference simulation setup
    (4 transmit antennas, 1 receive antenna, 2 time slots / RF chains,
    3 paths, 60 GHz carrier, half-wavelength spacing, 64-QAM)."""

    n_antennas: int = 4
    n_rf: int = 2
    n_receive: int = 1
    n_paths: int = 3
    snr_grid_db: tuple[float, ...] = DEFAULT_SNR_GRID_DB
    modulation: int = 64
    schemes: tuple[str, ...] = beamformer.SCHEMES
    channel_kind: str = channel.MMWAVE
    trials: int = 100_000
    target_errors: int = 100
    max_trials: int = 10_000_000
    seed: int = 0
    normalization: str = stbc.NORM_EQ1
    include_array_gain: bool = True
    noise_variance: float = 1.0
    carrier_frequency_hz: float = 60e9
    spacing_over_wavelength: float = 0.5
    theta_points: int = 721

    def __post_init__(self) -> None:
        self.snr_grid_db = tuple(float(v) for v in self.snr_grid_db)
        self.schemes = tuple(self.schemes)
        self.validate()

    @property
    def q(self) -> int:
        return int(np.log2(self.n_antennas))

    @property
    def steering(self) -> channel.SteeringConfig:
        return channel.SteeringConfig(
            carrier_frequency_hz=self.carrier_frequency_hz,
            spacing_over_wavelength=self.spacing_over_wavelength,
        )

    def validate(self) -> None:
        n = self.n_antennas
        if n < 2 or n & (n - 1):
            raise ValueError("n_antennas must be a power of two, at least 2")
        if self.n_receive != 1:
            raise ValueError("only single-antenna receivers are supported")
        uses_bpr = any(s in beamformer.BPR_SCHEMES for s in self.schemes)
        if uses_bpr and self.n_rf != n // 2:
            raise ValueError("blockwise schemes require n_rf == n_antennas / 2")
        if not self.snr_grid_db:
            raise ValueError("snr_grid_db must be nonempty")
        if any(b <= a for a, b in zip(self.snr_grid_db, self.snr_grid_db[1:])):
            raise ValueError("snr_grid_db must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.modulation not in stbc.SUPPORTED_ORDERS:
            raise ValueError(f"unsupported modulation order {self.modulation}")
        unknown = set(self.schemes) - set(beamformer.SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        if self.channel_kind not in channel.CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.channel_kind!r}")
        if self.normalization not in stbc.NORM_MODES:
            raise ValueError(f"unknown normalization mode {self.normalization!r}")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def content_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# vectorized internals


def _sample_channels(cfg: ExperimentConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    if cfg.channel_kind == channel.MMWAVE:
        return channel.sample_mmwave_batch(n, cfg.n_paths, cfg.n_antennas, cfg.steering, rng)
    return channel.sample_rayleigh_batch(n, cfg.n_antennas, rng)


def _batch_greedy_phases(h: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized mirror of :func:`beamlink.phase_opt.greedy_bpr_phases`
    over the rows of ``h``; returns (phi1, phi2) per row."""
    b, n = h.shape
    half = n // 2
    grid1, grid2 = phase_opt.block_grids(q)
    hc = h.conj()
    acc = np.zeros(b, dtype=np.complex128)
    alive = np.ones((b, n), dtype=bool)
    phi = [np.empty((b, half)), np.empty((b, half))]
    rows = np.arange(b)
    for block, grid in enumerate((grid1, grid2)):
        rotations = np.exp(1j * grid.angles)
        for slot in range(half):
            scores = np.abs(acc[:, None, None] + hc[:, :, None] * rotations[None, None, :])
            scores[~alive] = -np.inf
            # first flat maximum = lowest element index, then lowest grid
            # index, matching the scalar tie-breaking
            flat = scores.reshape(b, -1).argmax(axis=1)
            elem, gidx = np.divmod(flat, rotations.size)
            phi[block][:, slot] = grid.angles[gidx]
            acc = acc + hc[rows, elem] * rotations[gidx]
            alive[rows, elem] = False
    return phi[0], phi[1]


def _batch_equivalent_channels(
    scheme: str, h: np.ndarray, cfg: ExperimentConfig
) -> np.ndarray:
    """Per-row equivalent channels ``F^H h`` with per-row phase selection
    for the blockwise schemes."""
    q = cfg.q
    if scheme in (beamformer.DFT, beamformer.HADAMARD):
        bf = _fixed_beamformer(scheme, q)
        return h @ bf.matrix.conj()
    variant = beamformer.golden_variant(scheme)
    half = cfg.n_antennas // 2
    phi1, phi2 = _batch_greedy_phases(h, q)
    w = hadamard(half).astype(np.float64)
    top = h[:, :half] @ w
    bot = h[:, half:] @ w
    scale = np.conj(variant.g) / np.sqrt(beamformer.xi(q, variant.n_root))
    return scale * (np.exp(-1j * phi1) * top + np.exp(-1j * phi2) * bot)


def _fixed_beamformer(scheme: str, q: int) -> beamformer.BeamformingMatrix:
    if scheme == beamformer.DFT:
        return beamformer.build_dft_atb(q)
    if scheme == beamformer.HADAMARD:
        return beamformer.build_hadamard_atb(q)
    raise ValueError(f"{scheme!r} has no channel-independent beamformer")


def _link_amplitude(cfg: ExperimentConfig, gamma0: float, kappa: float) -> float:
    """Scale multiplying ``h_eq^H S`` in the received block.

    Under ``eq1`` the codeword is F S and the link applies the
    received-signal prefactor sqrt(P N_t / L) (or sqrt(P) when the array
    gain factor is disabled); under ``eq10`` the explicit sqrt(gamma0 *
    kappa) codeword scaling is the only amplitude, so the bound formulas
    describe the link exactly.
    """
    if cfg.normalization == stbc.NORM_EQ10:
        return float(np.sqrt(gamma0 * kappa))
    if cfg.include_array_gain:
        return stbc.eq1_amplitude(gamma0, cfg.n_antennas, cfg.n_paths)
    return float(np.sqrt(gamma0))


def _ber_block(
    h_eq: np.ndarray,
    const: stbc.Constellation,
    amplitude: float,
    sigma2: float,
    rng: np.random.Generator,
) -> int:
    """Simulate one block of codewords over the given equivalent channels
    and return the bit error count."""
    n = h_eq.shape[0]
    k = const.bits_per_symbol
    bits = rng.integers(0, 2, (n, 2 * k), dtype=np.uint8)
    weights = 1 << np.arange(k - 1, -1, -1)
    idx1 = bits[:, :k] @ weights
    idx2 = bits[:, k:] @ weights
    s1 = const.points[idx1]
    s2 = const.points[idx2]
    g1, g2 = h_eq[:, 0], h_eq[:, 1]
    y1 = amplitude * (np.conj(g1) * s1 + np.conj(g2) * s2)
    y2 = amplitude * (-np.conj(g1) * np.conj(s2) + np.conj(g2) * np.conj(s1))
    noise = np.sqrt(sigma2 / 2.0) * (
        rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    )
    y1 = y1 + noise[:, 0]
    y2 = y2 + noise[:, 1]
    denom = amplitude * (np.abs(g1) ** 2 + np.abs(g2) ** 2)
    denom = np.where(denom == 0.0, 1.0, denom)
    s1_hat = (g1 * y1 + np.conj(g2) * np.conj(y2)) / denom
    s2_hat = (g2 * y1 - np.conj(g1) * np.conj(y2)) / denom
    idx1_hat = np.abs(s1_hat[:, None] - const.points[None, :]).argmin(axis=1)
    idx2_hat = np.abs(s2_hat[:, None] - const.points[None, :]).argmin(axis=1)
    decoded = np.concatenate([const.labels[idx1_hat], const.labels[idx2_hat]], axis=1)
    return int(np.count_nonzero(decoded != bits))


def _ber_point(
    cfg: ExperimentConfig, scheme_idx: int, snr_idx: int, gamma0_db: float
) -> tuple[float, float, int]:
    """Run the stopping-rule Monte Carlo for one (scheme, SNR) point.

    Returns (ber, wilson_half_width, codeword_trials). Counting stops
    once both the minimum trial count and the target error count are
    met, or at the trial cap.
    """
    scheme = cfg.schemes[scheme_idx]
    const = stbc.make_constellation(cfg.modulation)
    gamma0 = 10.0 ** (gamma0_db / 10.0)
    amplitude = _link_amplitude(cfg, gamma0, beamformer.kappa(scheme, cfg.q))
    bits_per_cw = 2 * const.bits_per_symbol
    errors = 0
    trials = 0
    block_idx = 0
    while trials < cfg.max_trials and (
        trials < cfg.trials or errors < cfg.target_errors
    ):
        n = min(TRIAL_BLOCK, cfg.max_trials - trials)
        rng = substream(cfg.seed, _PURPOSE_FIG3, scheme_idx, snr_idx, block_idx)
        h = _sample_channels(cfg, n, rng)
        h_eq = _batch_equivalent_channels(scheme, h, cfg)
        errors += _ber_block(h_eq, const, amplitude, cfg.noise_variance, rng)
        trials += n
        block_idx += 1
    n_bits = trials * bits_per_cw
    lo, hi = analysis.wilson_interval(errors, n_bits)
    return errors / n_bits, (hi - lo) / 2.0, trials


# ---------------------------------------------------------------------------
# output plumbing


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, header: str, rows: list[tuple]) -> None:
    lines = [header]
    lines += [",".join(_format(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class SweepResult:
    """Rows produced by one runner plus the file it was written to."""

    name: str
    path: Path
    rows: list[tuple]
    notes: list[str] = field(default_factory=list)


def write_manifest(out_dir: Path, cfg: ExperimentConfig, results: list[SweepResult], wall_s: float) -> Path:
    manifest = {
        "config": cfg.to_dict(),
        "config_sha256": cfg.content_hash(),
        "files": {r.path.name: _sha256(r.path) for r in results},
        "notes": {r.name: r.notes for r in results if r.notes},
        "wall_time_s": wall_s,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# runners


def run_table1(cfg: ExperimentConfig, out_dir: str | Path) -> SweepResult:
    """Per-entry power factor of every scheme at the configured q."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    q = cfg.q
    rows = []
    for scheme in beamformer.SCHEMES:
        xi_val = (
            beamformer.xi(q, beamformer.golden_variant(scheme).n_root)
            if scheme in beamformer.BPR_SCHEMES
            else None
        )
        rows.append((scheme, q, beamformer.kappa(scheme, q), xi_val))
    path = out_dir / "table1.csv"
    _write_csv(path, "scheme,q,kappa,xi", rows)
    return SweepResult(name="table1", path=path, rows=rows)


def run_fig1(cfg: ExperimentConfig, out_dir: str | Path) -> SweepResult:
    """Beamspace gain of every beamformer column over a departure grid.

    The blockwise schemes are channel dependent; their patterns use the
    greedy selection for one seeded channel draw, recorded in the notes.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    theta = np.linspace(-np.pi / 2, np.pi / 2, max(cfg.theta_points, 361))
    rng = substream(cfg.seed, _PURPOSE_FIG1)
    h = _sample_channels(cfg, 1, rng)[0]
    rows = []
    notes = ["blockwise patterns use greedy phases for one seeded channel draw"]
    for scheme in cfg.schemes:
        bf = _beamformer_for_channel(scheme, cfg, h)
        pattern = analysis.beamspace_pattern(bf, theta, cfg.steering)
        for k in range(bf.n_chains):
            spread = float(pattern.spread_rad[k])
            for t_idx in range(theta.size):
                rows.append(
                    (scheme, k, float(theta[t_idx]), float(pattern.gains[t_idx, k]), spread)
                )
    path = out_dir / "fig1.csv"
    _write_csv(path, "scheme,column,theta_rad,gain,spread_rad", rows)
    return SweepResult(name="fig1", path=path, rows=rows, notes=notes)


def _beamformer_for_channel(
    scheme: str, cfg: ExperimentConfig, h: np.ndarray
) -> beamformer.BeamformingMatrix:
    if scheme in (beamformer.DFT, beamformer.HADAMARD):
        return _fixed_beamformer(scheme, cfg.q)
    selection = phase_opt.greedy_bpr_phases(h, cfg.q)
    return beamformer.build_bpr_atb(
        cfg.q, beamformer.golden_variant(scheme), selection.phi1, selection.phi2
    )


def run_fig2(cfg: ExperimentConfig, out_dir: str | Path) -> SweepResult:
    """Average spectral efficiency of each scheme over the SNR grid.

    One common set of channel realizations is shared by all schemes
    (paired comparison); blockwise schemes re-run the greedy selection
    per realization. The confidence half width is 1.96 sigma of the
    sample mean.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    quad_forms = _fig2_quadratic_forms(cfg)
    eff_scale = cfg.n_antennas / cfg.n_paths if cfg.include_array_gain else 1.0
    rows = []
    for scheme in cfg.schemes:
        qf = quad_forms[scheme]
        for gamma0_db in cfg.snr_grid_db:
            gamma0 = 10.0 ** (gamma0_db / 10.0)
            rates = np.log2(1.0 + gamma0 * eff_scale * qf)
            half = 1.959963984540054 * rates.std(ddof=1) / np.sqrt(rates.size)
            rows.append(
                (scheme, None, "spectral_efficiency_bits", gamma0_db,
                 float(rates.mean()), float(half), int(rates.size))
            )
    path = out_dir / "fig2.csv"
    _write_csv(path, CSV_HEADER, rows)
    notes = [
        f"normalization={cfg.normalization}",
        f"include_array_gain={cfg.include_array_gain} (rate uses P*{eff_scale:g})",
    ]
    return SweepResult(name="fig2", path=path, rows=rows, notes=notes)


def _fig2_quadratic_forms(cfg: ExperimentConfig) -> dict[str, np.ndarray]:
    """``||F^H h||^2`` per realization for each scheme, on shared channels."""
    quad_forms: dict[str, np.ndarray] = {s: np.empty(cfg.trials) for s in cfg.schemes}
    done = 0
    block_idx = 0
    while done < cfg.trials:
        n = min(TRIAL_BLOCK, cfg.trials - done)
        rng = substream(cfg.seed, _PURPOSE_FIG2, block_idx)
        h = _sample_channels(cfg, n, rng)
        for scheme in cfg.schemes:
            h_eq = _batch_equivalent_channels(scheme, h, cfg)
            quad_forms[scheme][done : done + n] = np.sum(np.abs(h_eq) ** 2, axis=1)
        done += n
        block_idx += 1
    return quad_forms


def monotonicity_notes(scheme: str, curve: list[tuple[float, float, float]]) -> list[str]:
    """Flag adjacent (snr_db, ber, half_width) points whose increase
    exceeds the combined confidence."""
    notes = []
    for (d0, b0, h0), (d1, b1, h1) in zip(curve, curve[1:]):
        if b1 - h1 > b0 + h0:
            notes.append(f"non-monotone beyond confidence: {scheme} {d0:g}->{d1:g} dB")
    return notes


def run_fig3(cfg: ExperimentConfig, out_dir: str | Path) -> SweepResult:
    """Monte-Carlo bit error rate of each scheme over the SNR grid."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    notes = [f"normalization={cfg.normalization}"]
    for scheme_idx, scheme in enumerate(cfg.schemes):
        curve = []
        for snr_idx, gamma0_db in enumerate(cfg.snr_grid_db):
            ber, half, trials = _ber_point(cfg, scheme_idx, snr_idx, gamma0_db)
            curve.append((gamma0_db, ber, half))
            rows.append((scheme, cfg.modulation, "ber", gamma0_db, ber, half, trials))
        notes.extend(monotonicity_notes(scheme, curve))
    path = out_dir / "fig3.csv"
    _write_csv(path, CSV_HEADER, rows)
    return SweepResult(name="fig3", path=path, rows=rows, notes=notes)


def run_all(cfg: ExperimentConfig, out_dir: str | Path) -> list[SweepResult]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    cfg.to_json(out_dir / "config.json")
    results = [
        run_table1(cfg, out_dir),
        run_fig1(cfg, out_dir),
        run_fig2(cfg, out_dir),
        run_fig3(cfg, out_dir),
    ]
    write_manifest(out_dir, cfg, results, time.perf_counter() - start)
    return results


# ---------------------------------------------------------------------------
# validation utilities


def measure_gap_db(
    curve_a: list[tuple[float, float]],
    curve_b: list[tuple[float, float]],
    target_ber: float,
) -> float:
    """Horizontal distance (dB) between two BER curves at a target level.

    Each curve is a list of (gamma0_db, ber) points; the crossing SNR is
    found by linear interpolation of log10(ber) against dB. Positive
    output means curve_a reaches the target at a lower SNR than curve_b.
    """
    return _crossing_snr(curve_b, target_ber) - _crossing_snr(curve_a, target_ber)


def _crossing_snr(curve: list[tuple[float, float]], target: float) -> float:
    pts = sorted((snr, ber) for snr, ber in curve if ber > 0)
    log_t = np.log10(target)
    for (s0, b0), (s1, b1) in zip(pts, pts[1:]):
        l0, l1 = np.log10(b0), np.log10(b1)
        if (l0 - log_t) * (l1 - log_t) <= 0 and l0 != l1:
            return s0 + (s1 - s0) * (l0 - log_t) / (l0 - l1)
    raise ValueError(f"curve does not cross BER {target}")


def simulate_bpsk_rayleigh_ber(
    gamma_bar_db: float, n_trials: int, seed: int = 0
) -> tuple[float, float, float, int]:
    """Monte-Carlo BPSK error rate over a scalar Rayleigh channel.

    The link is calibrated so the instantaneous SNR of the detection
    statistic is exponential with mean ``gamma_bar``, matching the
    averaged closed form :func:`beamlink.analysis.mgf_ber_bpsk`. Returns
    (ber, wilson_lo, wilson_hi, n_trials).
    """
    gamma_bar = 10.0 ** (gamma_bar_db / 10.0)
    amplitude = np.sqrt(gamma_bar / 2.0)
    errors = 0
    done = 0
    block_idx = 0
    while done < n_trials:
        n = min(TRIAL_BLOCK, n_trials - done)
        rng = substream(seed, _PURPOSE_BPSK_CHECK, block_idx)
        h = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        bits = rng.integers(0, 2, n)
        symbols = 1.0 - 2.0 * bits
        noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        y = amplitude * h * symbols + noise
        detected = (np.real(np.conj(h) * y) < 0).astype(np.int64)
        errors += int(np.count_nonzero(detected != bits))
        done += n
        block_idx += 1
    lo, hi = analysis.wilson_interval(errors, n_trials)
    return errors / n_trials, lo, hi, n_trials


def simulate_conditional_ber(
    h_eq: np.ndarray,
    constellation: stbc.Constellation,
    gamma0: float,
    kappa: float,
    mode: str,
    n_trials: int,
    seed: int = 0,
    include_array_gain: bool = True,
    n_antennas: int = 4,
    n_paths: int = 3,
) -> tuple[int, int]:
    """Error count for a fixed equivalent channel (noise-only randomness).

    Returns (bit_errors, total_bits); used to compare simulation against
    the conditional union bound.
    """
    if mode == stbc.NORM_EQ10:
        amplitude = float(np.sqrt(gamma0 * kappa))
    elif include_array_gain:
        amplitude = stbc.eq1_amplitude(gamma0, n_antennas, n_paths)
    else:
        amplitude = float(np.sqrt(gamma0))
    errors = 0
    done = 0
    block_idx = 0
    while done < n_trials:
        n = min(TRIAL_BLOCK, n_trials - done)
        rng = substream(seed, _PURPOSE_CONDITIONAL, block_idx)
        h_rows = np.broadcast_to(np.asarray(h_eq), (n, 2))
        errors += _ber_block(h_rows, constellation, amplitude, 1.0, rng)
        done += n
        block_idx += 1
    return errors, n_trials * 2 * constellation.bits_per_symbol

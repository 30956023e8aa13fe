from __future__ import annotations

import json
import logging
import uuid
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .exceptions import ConfigurationError, SingularFilterError
from .stats import Stats

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
WAVEFORMS = ("ofdm", "scfdma", "gfdm", "fbmc")
QAM_ORDERS = (4, 16, 64)
SWEEP_AXES = ("snr", "antennas")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

PRESETS = {
    "desk": {},
    "full": {"K": 1200, "M": 14, "M_pam": 28, "antennas": (8, 16, 32, 64, 128)},
}


@dataclass(frozen=True)
class SimConfig:
    """
    Dataclass to store a simulation's resolved configuration. Defaults are the desk-scale preset.
    """

    # ---- Waveform parameters ----
    # Waveforms to compare, any of ofdm, scfdma, gfdm, fbmc
    waveforms: Tuple[str, ...] = WAVEFORMS
    # Subcarriers per block
    K: int = 64
    # Blocks (GFDM subsymbols) per frame
    M: int = 14
    # FBMC real subsymbols per frame, None carries the same bits as M QAM blocks (2M)
    M_pam: Optional[int] = None
    # Data-carrying subcarriers, None is all K (PSD experiments default to 3K/4)
    K_active: Optional[int] = None
    # Square QAM order; FBMC uses the PAM alphabet with half the bits
    modulation_order: int = 64
    # GFDM prototype pulse, rrc or rect
    pulse: str = "rrc"
    rolloff: float = 0.25
    # monte-carlo or analytic
    gfdm_npi_calibration: str = "monte-carlo"
    # -------------------------------

    # ---- MIMO uplink ----
    # Base-station antennas
    B: int = 8
    # Single-antenna users
    U: int = 8
    # iid-rayleigh, tapped-delay-line or identity
    channel_model: str = "iid-rayleigh"
    # per-frame or per-block
    coherence: str = "per-frame"
    # Taps of the tapped-delay-line model
    tdl_taps: int = 4
    # ---------------------

    # ---- Link simulation ----
    # Per-receive-antenna SNR points in dB, N0 = 10^(-SNR/10)
    snr_db: Tuple[float, ...] = (10.0,)
    # Frames per SNR point
    trials: int = 100
    # Trials per parallel shard
    shard_trials: int = 25
    llr_clamp: float = 64.0
    # Write llrs.csv for the first trial of every point
    dump_llr: bool = False
    # -------------------------

    # ---- Sweeps and complexity ----
    sweep_axis: str = "snr"
    # Axis values, None sweeps over snr_db or antennas
    sweep_values: Optional[Tuple[float, ...]] = None
    # Antenna counts for complexity tables and antenna sweeps
    antennas: Tuple[int, ...] = (8, 16, 32, 64, 128)
    # -------------------------------

    # ---- PAPR and PSD ----
    papr_frames: int = 1000
    # Oversampling factor, 1, 2 or 4
    papr_oversample: int = 4
    psd_frames: int = 200
    # Welch segment length, None is 8K
    psd_segment: Optional[int] = None
    psd_overlap: float = 0.5
    psd_window: str = "hann"
    # Guard subcarriers between the band edge and the out-of-band region
    oob_guard: int = 2
    # ----------------------

    # ---- Execution ----
    master_seed: int = 1
    # Worker processes, 0 uses every core, 1 runs in-process
    threads: int = 1
    output_dir: str = "results"
    # csv or parquet
    output_format: str = "csv"
    # -------------------

    preset: str = "desk"
    schema_version: int = SCHEMA_VERSION
    # Log level
    log_level: str = "INFO"
    # Debug (if true, the run ID will be 00000000-0000-0000-0000-000000000000)
    debug: bool = False

    @property
    def pam_subsymbols(self) -> int:
        return 2 * self.M if self.M_pam is None else self.M_pam

    @property
    def psd_active(self) -> int:
        return 3 * self.K // 4 if self.K_active is None else self.K_active

    @property
    def psd_segment_length(self) -> int:
        return 8 * self.K if self.psd_segment is None else self.psd_segment

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass
class SimulationRun:
    """
    Dataclass to store a simulation execution state
    """

    # Run input parameters
    config: SimConfig
    # Run ID
    run_id: str
    output_dir: Path
    stats: Stats = field(default_factory=Stats)
    # Files written by this run, name -> path
    outputs: Dict[str, Path] = field(default_factory=dict)
    # Failed sweep points, "axis=value: error"
    failures: List[str] = field(default_factory=list)


_TUPLE_FIELDS = {"waveforms": str, "snr_db": float, "sweep_values": float, "antennas": int}
_INT_FIELDS = {
    "K", "M", "M_pam", "K_active", "modulation_order", "B", "U", "tdl_taps", "trials", "shard_trials",
    "papr_frames", "papr_oversample", "psd_frames", "psd_segment", "oob_guard", "master_seed", "threads",
    "schema_version",
}
_FLOAT_FIELDS = {"rolloff", "llr_clamp", "psd_overlap"}


def _as_int(value) -> int:
    if isinstance(value, float) and not value.is_integer():
        raise ValueError(f"{value} is not an integer")
    return int(value)


def _coerce(params: dict) -> dict:
    for key, value in list(params.items()):
        if value is None:
            continue
        try:
            if key in _TUPLE_FIELDS:
                values = [value] if isinstance(value, (str, int, float)) else value
                convert = _as_int if _TUPLE_FIELDS[key] is int else _TUPLE_FIELDS[key]
                params[key] = tuple(convert(v) for v in values)
            elif key in _INT_FIELDS:
                params[key] = _as_int(value)
            elif key in _FLOAT_FIELDS:
                params[key] = float(value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid value for {key}: {value!r} ({e})") from e
    return params


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigurationError(message)


def _check_values(c: SimConfig):
    _require(len(c.waveforms) > 0, "At least one waveform is required")
    unknown = set(c.waveforms) - set(WAVEFORMS)
    _require(not unknown, f"Unknown waveforms {sorted(unknown)}, expected any of {WAVEFORMS}")
    _require(len(set(c.waveforms)) == len(c.waveforms), "Waveforms must not repeat")

    _require(c.K >= 2, f"K must be >= 2, got {c.K}")
    _require(c.M >= 1, f"M must be >= 1, got {c.M}")
    _require(c.K_active is None or 1 <= c.K_active <= c.K, f"K_active must lie in [1, K], got {c.K_active}")
    _require(c.modulation_order in QAM_ORDERS, f"modulation_order must be one of {QAM_ORDERS}")
    _require(c.pulse in ("rrc", "rect"), f"pulse must be rrc or rect, got {c.pulse}")
    _require(0.0 <= c.rolloff <= 1.0, f"rolloff must lie in [0, 1], got {c.rolloff}")
    _require(
        c.gfdm_npi_calibration in ("monte-carlo", "analytic"),
        f"gfdm_npi_calibration must be monte-carlo or analytic, got {c.gfdm_npi_calibration}",
    )

    _require(c.U >= 1, f"U must be >= 1, got {c.U}")
    _require(c.B >= c.U, f"Linear detection needs B >= U, got B={c.B}, U={c.U}")
    _require(
        c.channel_model in ("iid-rayleigh", "tapped-delay-line", "identity"), f"Unknown channel_model {c.channel_model}"
    )
    _require(c.coherence in ("per-frame", "per-block"), f"Unknown coherence {c.coherence}")
    _require(1 <= c.tdl_taps <= c.K, f"tdl_taps must lie in [1, K], got {c.tdl_taps}")

    _require(len(c.snr_db) > 0, "At least one SNR point is required")
    _require(all(-100.0 <= s <= 200.0 for s in c.snr_db), "SNR points must lie in [-100, 200] dB")
    _require(c.trials >= 1, f"trials must be >= 1, got {c.trials}")
    _require(c.shard_trials >= 1, f"shard_trials must be >= 1, got {c.shard_trials}")
    _require(c.llr_clamp > 0, f"llr_clamp must be positive, got {c.llr_clamp}")

    _require(c.sweep_axis in SWEEP_AXES, f"sweep_axis must be one of {SWEEP_AXES}")
    _require(c.sweep_values is None or len(c.sweep_values) > 0, "sweep_values must not be empty")
    _require(len(c.antennas) > 0 and all(b >= 1 for b in c.antennas), "antennas must be positive counts")

    _require(c.papr_frames >= 1 and c.psd_frames >= 1, "papr_frames and psd_frames must be >= 1")
    _require(c.papr_oversample in (1, 2, 4), f"papr_oversample must be 1, 2 or 4, got {c.papr_oversample}")
    _require(0.0 <= c.psd_overlap < 1.0, f"psd_overlap must lie in [0, 1), got {c.psd_overlap}")
    _require(c.psd_segment_length >= 2, f"psd_segment must be >= 2, got {c.psd_segment}")
    _require(c.oob_guard >= 0, f"oob_guard must be >= 0, got {c.oob_guard}")

    _require(c.master_seed >= 0, f"master_seed must be non-negative, got {c.master_seed}")
    _require(c.threads >= 0, f"threads must be >= 0, got {c.threads}")
    _require(c.output_format in ("csv", "parquet"), f"output_format must be csv or parquet, got {c.output_format}")
    _require(
        c.log_level in LOG_LEVELS or c.log_level in [getattr(logging, name) for name in LOG_LEVELS],
        f"log_level must be one of {LOG_LEVELS}, got {c.log_level!r}",
    )


def _check_waveforms(c: SimConfig):
    from .waveforms.gfdm import make_prototype

    if "fbmc" in c.waveforms:
        _require(c.K >= 4 and c.K % 2 == 0, f"FBMC needs an even K >= 4, got K={c.K}")
        _require(c.pam_subsymbols >= 1, f"M_pam must be >= 1, got {c.M_pam}")
    if "gfdm" in c.waveforms:
        _require(c.M >= 2, f"GFDM needs M >= 2, got M={c.M}")
        try:
            make_prototype(c.K, c.M, c.pulse, c.rolloff)
        except SingularFilterError as e:
            raise ConfigurationError(f"GFDM prototype is not zero-forcing invertible: {e}") from e


def validate_config(params: dict) -> SimConfig:
    """
    Validate and populate missing configuration values. Returns a correct SimConfig instance.
    """
    params = dict(params)
    known = {f.name for f in fields(SimConfig)}
    unknown = set(params) - known
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")

    version = params.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"Unsupported schema_version {version}, expected {SCHEMA_VERSION}")

    preset = params.get("preset", "desk")
    if preset not in PRESETS:
        raise ConfigurationError(f"Unknown preset {preset}, expected one of {sorted(PRESETS)}")
    params = {**PRESETS[preset], **params}

    config = SimConfig(**_coerce(params))
    _check_values(config)
    _check_waveforms(config)
    return config


def load_config(path: Optional[Union[str, Path]] = None, **overrides) -> SimConfig:
    """
    Read a JSON configuration file and apply overrides (None values are ignored)
    """
    params = {}
    if path is not None:
        try:
            with open(path) as f:
                params = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read configuration {path}: {e}") from e
        if not isinstance(params, dict):
            raise ConfigurationError(f"Configuration {path} must hold a JSON object")
    params.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(params)


def new_simulation_run(config: SimConfig) -> SimulationRun:
    if config.debug:
        run_id = "00000000-0000-0000-0000-000000000000"
    else:
        run_id = str(uuid.uuid4())
    run = SimulationRun(config=config, run_id=run_id, output_dir=Path(config.output_dir))

    logger.info(
        "Created new run\n######################################################\n"
        "Simulation Run ID = %s\n"
        "######################################################",
        run.run_id,
    )
    return run


@dataclass
class RunManifest:
    """
    Plain-text record of what produced a run's outputs
    """

    config_hash: str
    seed: int
    version: str
    # Output file name -> sha256
    checksums: Dict[str, str] = field(default_factory=dict)
    # Stage -> seconds
    wall_clock: Dict[str, float] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    # Work counters such as link shards and trials
    counts: Dict[str, int] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"config_hash = {self.config_hash}",
            f"seed = {self.seed}",
            f"version = {self.version}",
        ]
        lines += [f"checksum.{name} = {digest}" for name, digest in sorted(self.checksums.items())]
        lines += [f"wall_clock.{stage} = {seconds:.3f}" for stage, seconds in self.wall_clock.items()]
        lines += [f"failure.{i} = {failure}" for i, failure in enumerate(self.failures)]
        lines += [f"count.{name} = {value}" for name, value in sorted(self.counts.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RunManifest:
        entries = dict(line.split(" = ", 1) for line in text.splitlines() if " = " in line)
        return cls(
            config_hash=entries["config_hash"],
            seed=int(entries["seed"]),
            version=entries["version"],
            checksums={k[len("checksum."):]: v for k, v in entries.items() if k.startswith("checksum.")},
            wall_clock={k[len("wall_clock."):]: float(v) for k, v in entries.items() if k.startswith("wall_clock.")},
            failures=[v for k, v in entries.items() if k.startswith("failure.")],
            counts={k[len("count."):]: int(v) for k, v in entries.items() if k.startswith("count.")},
        )

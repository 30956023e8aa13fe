from __future__ import annotations

import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .exceptions import ConfigurationError, NumericalError
from .link.link_caller import LinkPoint, run_link, trial_ranges
from .link.link_trial import transceiver_for
from .lithopswrapper import LithopsInvokerWrapper
from .metrics import complexity_count, complexity_table, oob_ratio, papr_ccdf, psd_welch
from .numerics import RngStream, StreamPurpose
from .pipeline import RunManifest, SimConfig, SimulationRun, new_simulation_run, validate_config
from .utils import file_sha256, log_parameters, resolve_threads, setup_logging, text_sha256, write_table

logger = logging.getLogger(__name__)


def papr_frames(config: SimConfig, waveform: str):
    """
    Lithops callee function
    PAPR of papr_frames random frames of one waveform
    """
    tx = transceiver_for(config, waveform, config.K_active)
    root = RngStream(config.master_seed, (StreamPurpose.PAPR, config.K))
    values = []
    for frame in range(config.papr_frames):
        grid = tx.random_frame(root.child(frame).generator())
        values.append(tx.papr_segments(tx.time_signal(grid)))
    return {"waveform": waveform, "record": papr_ccdf(values, config.papr_oversample)}


def psd_frames(config: SimConfig, waveform: str):
    """
    Lithops callee function
    Welch PSD of psd_frames back-to-back random frames of one waveform, with K_active
    subcarriers carrying data
    """
    tx = transceiver_for(config, waveform, config.psd_active)
    root = RngStream(config.master_seed, (StreamPurpose.PSD, config.K, config.psd_active))
    x = np.concatenate(
        [tx.time_signal(tx.random_frame(root.child(frame).generator())) for frame in range(config.psd_frames)]
    )
    if config.psd_segment_length > x.size:
        raise ConfigurationError(
            f"psd_segment {config.psd_segment_length} exceeds the {x.size} samples of {config.psd_frames} frames"
        )
    record = psd_welch(
        x,
        config.psd_segment_length,
        overlap=config.psd_overlap,
        window=config.psd_window,
        K=config.K,
        K_active=config.psd_active,
        guard=config.oob_guard,
    )
    return {"waveform": waveform, "record": record}


class WaveformSimulation:
    def __init__(self, **parameters):
        self.config: SimConfig = validate_config(parameters)
        setup_logging(self.config.log_level)

        logger.info("Init multi-carrier MU-MIMO waveform simulation")
        self.state: SimulationRun = new_simulation_run(self.config)

        self._setup()

    def _setup(self):
        if self.config.log_level in ("DEBUG", logging.DEBUG):
            log_parameters(self.config)
        self.invoker = LithopsInvokerWrapper(resolve_threads(self.config.threads))

    @classmethod
    def from_config(cls, config: SimConfig):
        return cls(**{f: getattr(config, f) for f in config.__dataclass_fields__})

    def _write(self, df: pd.DataFrame, name: str):
        path = write_table(df, self.state.output_dir, name, self.config.output_format)
        self.state.outputs[path.name] = path
        return path

    def _count_link(self, errors: pd.DataFrame):
        stats = self.state.stats
        stats.incr_value("link_shards", len(errors) * len(trial_ranges(self.config.trials, self.config.shard_trials)))
        stats.incr_value("link_trials", int(errors.trials.sum()))

    def simulate(self, points: Optional[Sequence[LinkPoint]] = None) -> pd.DataFrame:
        """
        Uncoded link simulation over the configured SNR points, written to errors.csv
        """
        if self.config.K_active not in (None, self.config.K):
            raise ConfigurationError("Link simulations use every subcarrier, K_active must equal K")

        with self.state.stats.timeit("simulate"):
            errors, llrs = run_link(self.config, self.invoker, points=points)
        self._count_link(errors)
        self._write(errors, "errors")
        if self.config.dump_llr:
            self._write(llrs, "llrs")
        self.finalize()
        return errors

    def papr(self) -> pd.DataFrame:
        with self.state.stats.timeit("papr"):
            iterdata = [{"config": self.config, "waveform": w} for w in self.config.waveforms]
            results = self.invoker.map(papr_frames, iterdata)

        tables = []
        for result in results:
            record = result["record"]
            table = record.to_frame()
            table.insert(0, "waveform", result["waveform"])
            tables.append(table)
            logger.info("%s PAPR at CCDF 1e-3: %.1f dB", result["waveform"], record.threshold_at(1e-3))
        df = pd.concat(tables, ignore_index=True)
        self._write(df, "papr_ccdf")
        self.finalize()
        return df

    def psd(self) -> pd.DataFrame:
        with self.state.stats.timeit("psd"):
            iterdata = [{"config": self.config, "waveform": w} for w in self.config.waveforms]
            results = self.invoker.map(psd_frames, iterdata)

        tables, ratios = [], []
        for result in results:
            table = result["record"].to_frame()
            table.insert(0, "waveform", result["waveform"])
            tables.append(table)
            ratio = oob_ratio(result["record"])
            ratios.append({"waveform": result["waveform"], "oob_ratio_db": ratio})
            logger.info("%s OOB ratio: %.1f dB", result["waveform"], ratio)
        df = pd.concat(tables, ignore_index=True)
        self._write(df, "psd")
        self._write(pd.DataFrame(ratios), "oob")
        self.finalize()
        return df

    def complexity(self) -> pd.DataFrame:
        c = self.config
        with self.state.stats.timeit("complexity"):
            counts = [
                complexity_count(w, B, c.U, c.K, c.M, c.pam_subsymbols) for w in c.waveforms for B in c.antennas
            ]
        df = complexity_table(counts)
        self._write(df, "complexity")
        self.finalize()
        return df

    def sweep(self, axis: Optional[str] = None, values: Optional[Sequence[float]] = None) -> pd.DataFrame:
        """
        One link run per axis value. A failing point is logged and recorded in the manifest,
        the remaining points still run.
        """
        c = self.config
        axis = c.sweep_axis if axis is None else axis
        if axis not in ("snr", "antennas"):
            raise ConfigurationError(f"Unknown sweep axis {axis}")
        if values is None:
            values = c.sweep_values or (c.snr_db if axis == "snr" else c.antennas)
        if len(values) == 0:
            raise ConfigurationError("Sweep needs at least one axis value")
        if axis == "antennas" and any(float(v) != int(v) for v in values):
            raise ConfigurationError(f"Antenna counts must be integers, got {list(values)}")
        if c.K_active not in (None, c.K):
            raise ConfigurationError("Link simulations use every subcarrier, K_active must equal K")

        tables: List[pd.DataFrame] = []
        llr_tables: List[pd.DataFrame] = []
        with self.state.stats.timeit("sweep"):
            for value in values:
                if axis == "snr":
                    points = [LinkPoint(c.B, c.U, float(value))]
                else:
                    points = [LinkPoint(int(value), c.U, snr) for snr in c.snr_db]
                try:
                    errors, llrs = run_link(c, self.invoker, points=points)
                except (NumericalError, ValueError) as e:
                    logger.warning("Sweep point %s=%s failed: %s", axis, value, e)
                    self.state.failures.append(f"{axis}={value}: {e}")
                    continue
                self._count_link(errors)
                tables.append(errors)
                llr_tables.append(llrs)

        df = pd.concat(tables, ignore_index=True) if tables else pd.DataFrame()
        self._write(df, "errors")
        if c.dump_llr and llr_tables:
            self._write(pd.concat(llr_tables, ignore_index=True), "llrs")
        self.finalize()
        return df

    def manifest(self) -> RunManifest:
        from . import __version__

        return RunManifest(
            config_hash=text_sha256(self.config.to_json()),
            seed=self.config.master_seed,
            version=__version__,
            checksums={name: file_sha256(path) for name, path in self.state.outputs.items()},
            wall_clock=self.state.stats.elapsed,
            failures=list(self.state.failures),
            counts=self.state.stats.values,
        )

    def finalize(self) -> RunManifest:
        """
        Echo the resolved configuration and write manifest.txt next to the results
        """
        out = self.state.output_dir
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(self.config.to_json() + "\n")
        manifest = self.manifest()
        (out / "manifest.txt").write_text(manifest.to_text())
        logger.debug("Wrote manifest for run %s to %s", self.state.run_id, out)
        return manifest

    def run_all(self):
        """
        Execute every experiment in order
        """
        self.complexity()
        self.papr()
        self.psd()
        self.simulate()
        self.invoker.close()

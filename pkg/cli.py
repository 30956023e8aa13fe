import argparse
import logging
import sys

from mimowaveforms.exceptions import ConfigurationError, NumericalError
from mimowaveforms.pipeline import LOG_LEVELS, load_config
from mimowaveforms.simulation import WaveformSimulation

logger = logging.getLogger("mimowaveforms.cli")

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

COMMANDS = ("simulate", "papr", "psd", "complexity", "sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Multi-carrier waveforms in large-scale MU-MIMO uplink - link, PAPR, PSD and complexity "
        "experiments. SNR is per receive antenna: N0 = 10^(-SNR/10) for unit-power symbols and channel gains."
    )
    parser.add_argument("command", choices=COMMANDS, help="experiment to run")

    # Configuration
    parser.add_argument("-c", "--config", help="JSON configuration file (schema_version 1)", required=False)
    parser.add_argument("-s", "--seed", type=int, help="master seed, overrides the configuration", required=False)
    parser.add_argument("-o", "--out", help="output directory for CSVs, config.json and manifest.txt", required=False)
    parser.add_argument("-n", "--trials", type=int, help="frames per SNR point", required=False)
    parser.add_argument("-t", "--threads", type=int, help="worker processes, 0 = all cores", required=False)

    # Sweep settings
    parser.add_argument("-a", "--axis", choices=("snr", "antennas"), help="sweep axis", required=False)
    parser.add_argument(
        "-v", "--values", type=float, nargs="+", help="sweep values (SNR in dB or antenna counts)", required=False
    )

    parser.add_argument(
        "-l", "--log-level", dest="log_level", type=str.upper, choices=LOG_LEVELS, help="logging level", required=False
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    simulation = None
    try:
        config = load_config(
            args.config,
            master_seed=args.seed,
            output_dir=args.out,
            trials=args.trials,
            threads=args.threads,
            sweep_axis=args.axis,
            sweep_values=args.values,
            log_level=args.log_level,
        )
        simulation = WaveformSimulation.from_config(config)
        getattr(simulation, args.command)()
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except NumericalError as e:
        print(f"Numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    finally:
        if simulation is not None:
            simulation.invoker.close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

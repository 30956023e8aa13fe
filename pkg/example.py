import logging

from mimowaveforms import WaveformSimulation

if __name__ == '__main__':
    simulation = WaveformSimulation(
        K=64,
        M=14,
        B=32,
        U=8,
        snr_db=[0.0, 5.0, 10.0],
        trials=200,
        papr_frames=2000,
        psd_frames=100,
        threads=0,
        output_dir="results/desk",
        log_level=logging.DEBUG,
        debug=True,
    )
    # simulation.sweep(axis="antennas", values=[8, 32, 128])
    simulation.run_all()

"""Sweep one physical error channel and compare SRB fits with the analytic table.

The error is applied after every phase gate.  With three phase gates per
Clifford, the per-gate decays are the cube roots of the fitted per-Clifford
decays r and t.
"""
import math
import sys
import warnings

from srb.analysis import analyze
from srb.engine import DetectorModel, ExperimentConfig, default_lengths, run_experiment
from srb.noise import NoiseModel, analytic_decay, classify_channel, make_channel


def main(kind="optical_pumping", epsilons=(0.01, 0.03, 0.05)):
    print(f"{kind}: {classify_channel(make_channel(kind, 0.01)).channel_type.value}")
    print(f"{'eps':>6} {'r_zz fit':>9} {'table':>8} {'t_zz fit':>9} {'table':>8}")
    for eps in epsilons:
        r_zz, t_zz, _ = analytic_decay(kind, eps)
        err = max(1 - r_zz**3, 1 - t_zz**3)
        lmax = int(min(400, max(10, math.ceil(1 / err))))
        cfg = ExperimentConfig(lengths=default_lengths(1 / lmax, 8), n_sequences=100,
                               n_shots=100, detector=DetectorModel(), master_seed=7,
                               noise=NoiseModel(per_phase_gate=make_channel(kind, eps)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d = analyze(run_experiment(cfg), n_resamples=50).derived
        print(f"{eps:>6} {d['r_zz']:>9.5f} {r_zz:>8.5f} {d['t_zz']:>9.5f} {t_zz:>8.5f}")


if __name__ == "__main__":
    main(*sys.argv[1:2])

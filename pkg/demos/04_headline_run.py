"""Simulate an experiment shaped like the two-ion SRB run and walk the fidelity chain.

Per-Clifford noise is tuned so the twirled decays are r = 0.9934 and
t = 0.985.  From the fitted r and t the script derives the extended subspace
fidelity f' = (8r + t + 1)/10 and the per-phase-gate error (1 - f')/3.
"""
import warnings
from pathlib import Path

from srb.analysis import analyze
from srb.config import load_config
from srb.engine import run_experiment


def main():
    spec = load_config(Path(__file__).parent / "configs" / "srb_headline.yaml")
    ds = run_experiment(spec.experiment)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = analyze(ds, spec.bootstrap, spec.analysis_seed, spec.gates_per_clifford)
    d = report.derived
    print("per-length standard survival:")
    pts = report.points["standard"]
    for l, m, s in zip(pts.lengths, pts.means, pts.sems):
        print(f"  l={int(l):3d}  p={m:.4f} +- {s:.4f}")
    print(f"r   = {d['r']:.5f} +- {d['r_ci']:.5f}   (injected 0.9934)")
    print(f"t   = {d['t']:.4f} +- {d['t_ci']:.4f}     (injected 0.985)")
    print(f"f_Cliff = {d['f_cliff']:.5f}")
    print(f"f'      = {d['f_prime']:.5f} +- {d['f_prime_ci']:.5f}")
    print(f"1 - f_ZZ' = {d['one_minus_f_zz_prime']:.2e}")
    print(f"bound on |F - f'|: [{d['fidelity_gap_lower']:.2e}, {d['fidelity_gap_upper']:.3f}]")


if __name__ == "__main__":
    main()

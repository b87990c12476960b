"""Threshold detection of two ions and its correction by detector tomography.

Outcome k (k bright ions) emits Poisson(9k + 0.1(2-k)) photons.  Counts are
binned at maximum-likelihood thresholds, the confusion matrix is measured by
preparing each class, and its inverse corrects the observed frequencies.
"""
import numpy as np

from srb.engine import (DetectorModel, calibration_counts, correct_counts,
                        detector_tomography, simulate_detector)


def main():
    det = DetectorModel(bright_mean=9.0, dark_mean=0.1)
    rng = np.random.default_rng(3)
    print("thresholds (photons):", det.thresholds)
    print("analytic response:\n", np.round(det.response, 4))
    est = detector_tomography(calibration_counts(det, 10_000, rng))
    print("tomography (1e4 shots per class):\n", np.round(est, 4))

    p = np.array([0.6, 0.3, 0.1])
    observed = simulate_detector(rng.multinomial(10_000, p), det, rng)
    fixed = correct_counts(observed, est)
    print("true      ", p)
    print("observed  ", np.round(observed / observed.sum(), 4))
    print("corrected ", np.round(fixed.raw, 4))


if __name__ == "__main__":
    main()

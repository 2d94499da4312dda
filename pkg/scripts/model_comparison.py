#!/usr/bin/env python3
# Empirical moments of the two matrix models against the limit theory.
# The filtered model convolves an iid Wigner matrix with the filter; the
# colored Gaussian model draws independent entries with the matching
# variance profile.  Both should land on the same limiting moments.

import argparse

from filtered_spectra.kernel import compass_filter, kernel_from_filter
from filtered_spectra.moments import theoretical_moments
from filtered_spectra.matrixlab import (SampleConfig, sample_filtered_wigner,
                                        sample_colored_gaussian,
                                        esd_statistics)

ap = argparse.ArgumentParser()
ap.add_argument("--N-filtered", type=int, default=600)
ap.add_argument("--N-colored", type=int, default=30)
ap.add_argument("--trials", type=int, default=5)
ap.add_argument("--seed", type=int, default=7)
ap.add_argument("--kmax", type=int, default=6)
args = ap.parse_args()

h = compass_filter()
kern = kernel_from_filter(h)
theory = [float(v) for v in theoretical_moments(kern, args.kmax)]

cfg = SampleConfig(N=args.N_filtered, seed=args.seed, trials=args.trials)
filt = esd_statistics([sample_filtered_wigner(cfg, h, trial=t)
                       for t in range(args.trials)], kmax=args.kmax)
col = esd_statistics([sample_colored_gaussian(kern, args.N_colored,
                                              args.seed, trial=t)
                      for t in range(args.trials)], kmax=args.kmax)

print(f"filtered N={args.N_filtered}, colored N={args.N_colored} "
      f"({args.N_colored ** 2}x{args.N_colored ** 2}), "
      f"{args.trials} trials each\n")
print(f"{'k':>2} {'theory':>10} {'filtered':>22} {'colored':>22}")
for k in range(args.kmax):
    f_m, f_se = filt.moment_mean[k], filt.moment_stderr[k]
    c_m, c_se = col.moment_mean[k], col.moment_stderr[k]
    print(f"{k + 1:>2} {theory[k]:>10.5f} "
          f"{f_m:>12.5f} +- {f_se:<8.5f} {c_m:>12.5f} +- {c_se:<8.5f}")

"""Filling two missing samples of a random band-limited signal.

Generates one test signal, deletes the samples at 0 and 3, and estimates
them from the rest.  Shows that whatever sits in the missing slots never
reaches the estimate, and how the error shrinks as the window widens.

Run:  python demos/02_fill_a_gap.py
"""
import numpy as np

from gapfill import GeneratorConfig, build_kernel, generate_profile, recover, synthesize, trial_rng

T, n = (0, 3), 15

# a signal whose spectrum is empty within 0.4 of +-pi; pi/15 < 0.4, so the
# band the kernel relies on is inside the empty region
cfg = GeneratorConfig(N=1500, seed=7)
profile = generate_profile(cfg, trial_rng(cfg.seed, 0))
x = synthesize(profile, cfg)
truth = np.array([x.value(t) for t in T])
print("true values        ", truth)

k = build_kernel(T, n, tap_radius=cfg.N + 3)
gappy = x.with_missing(T, poison=np.nan)          # NaN where samples are lost
est = recover(gappy, k, truncate=True).estimates
print("estimates          ", est)

# nothing from the missing slots is used
est_junk = recover(x.with_missing(T, poison=1e9), k, truncate=True).estimates
print("same with junk     ", np.array_equal(est, est_junk))

# error against window half-width
for N in (100, 300, 1000, 1500):
    sub = synthesize(profile, cfg, start=-N, length=2 * N + 1).with_missing(T)
    e = recover(sub, k, truncate=True).estimates - truth
    print("N=%5d  max error %.3e" % (N, np.max(np.abs(e))))

# shifting the gap: the same kernel serves missing times 7 and 10
shifted = x.with_missing((7, 10))
print("shift 7            ", recover(shifted, k, shift=7, truncate=True).estimates,
      " truth", [x.value(7), x.value(10)])

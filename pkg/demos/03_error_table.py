"""Monte-Carlo error table and the effect of noise.

Averages the relative recovery error over random band-limited signals for
the four settings of the error table, then adds spectral noise of known
L1 size and compares the observed error with eps + sigma (kappa + 1).

Set GAPFILL_THREADS to spread trials over threads.  The trial count here is
kept small; use ``gapfill bench --trials 200`` for the full numbers.

Run:  python demos/03_error_table.py
"""
from gapfill import GeneratorConfig, run_experiment

TRIALS = 40

print("%-8s %6s %10s %10s %10s" % ("T", "N", "mean", "median", "stderr"))
for T, N in [((0, 15), 150), ((0, 15), 300), ((0, 3), 300), ((0, 3), 1500)]:
    rep = run_experiment(T, 15, GeneratorConfig(N=N, trials=TRIALS, seed=1))
    print("%-8s %6d %10.4g %10.4g %10.2g" % (str(set(T)), N, rep.mean, rep.median, rep.stderr))

# noise: each trial is rerun with noise of spectral L1 norm sigma
for sigma in (0.05, 0.1):
    rep = run_experiment((0, 3), 15, GeneratorConfig(N=300, trials=TRIALS, seed=2), sigma=sigma)
    worst = max(tr["noisy_sup_error"] / tr["bound"] for tr in rep.trials)
    print("sigma=%.2f kappa=%.1f  violations %d/%d  worst error/bound %.3f"
          % (sigma, rep.kappa, rep.summary()["bound_violations"], TRIALS, worst))

# the bound is loose: the noise spectrum spreads over the whole circle and
# only the part near +-pi is amplified by kappa

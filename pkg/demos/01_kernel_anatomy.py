"""Anatomy of a recovering kernel.

Walks through the pieces behind ``build_kernel`` for two missing samples:
the difference set, the band weight ``w``, the transfer function and the
resulting taps.  Writes ``kernel_taps.csv`` and ``transfer.csv`` for plotting.

Run:  python demos/01_kernel_anatomy.py
"""
import numpy as np

from gapfill import BandGeometry, build_kernel, kappa, l1_mass, partition, transfer_eval
from gapfill.band_space import gram_condition

T, n = (0, 3), 15

# differences of missing times; the kernel has to vanish on all of them
s = partition(T, n)
print("S_T        =", s.s_T)
print("multiples  =", s.p_nT, " others =", s.pbar_nT)

# the band next to pi has width pi/n and cos(3w) is nearly constant on it,
# so the constant minus its projection onto cos(3w) is a small residual;
# rescaling that residual to mass pi - pi/n produces large coefficients
geom = BandGeometry(n)
print("band       = (%.4f, pi)" % geom.edge)
print("Gram cond  = %.3g" % gram_condition(s.ordering, geom))

k = build_kernel(T, n, tap_radius=300)
wn = k.transfer.w
for f, c in zip(wn.freqs, wn.float_coeffs()):
    print("w: %+.6g cos(%d w)" % (c, f))

# orthogonality to cos(3w) and unit mean mass are what make the kernel work
print("(w, cos 3w) = %.2e" % wn.inner_cos(3))
print("(w, 1)      = %.15f   pi - pi/n = %.15f" % (wn.inner_cos(0), np.pi - np.pi / n))

print("kappa       =", kappa(k.transfer))
print("L1 mass     =", l1_mass(k.transfer))

# taps: zero at the differences, slow 1/t decay elsewhere
print("h(-3..6)    =", np.round([k.tap(t) for t in range(-3, 7)], 5))
np.savetxt("kernel_taps.csv", np.column_stack([k.offsets, k.taps]), delimiter=",",
           header="t,h", comments="")

omega = np.linspace(0, np.pi, 2001)
np.savetxt("transfer.csv", np.column_stack([omega, transfer_eval(k.transfer, omega)]),
           delimiter=",", header="omega,H", comments="")
print("wrote kernel_taps.csv, transfer.csv")

# with 15 in place of 3 the only difference is a multiple of n, w is
# constant and the kernel is a scaled sinc
k15 = build_kernel((0, 15), n, tap_radius=300)
print("T={0,15}: w =", k15.transfer.w.float_coeffs(), " kappa =", kappa(k15.transfer))

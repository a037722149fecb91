"""Scaling study: QFI growth in time and in probe size, deep in the DTC phase.

Two fits:
  * QFI(n) at fixed L          -> time exponent alpha
  * QFI(L) at fixed cycle n    -> size exponent beta
"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np

from dtc_sense import FieldConfig, ProbeConfig, power_fit, stroboscopic_trace

H_A = 1e-5
EPSILON = 0.1
SIZES = range(3, 8)
CYCLES = 50
N_SNAPSHOT = 10

traces = {}
for L in SIZES:
    traces[L] = stroboscopic_trace(ProbeConfig(length=L, epsilon=EPSILON),
                                   FieldConfig(h_a=H_A), cycles=CYCLES)
    print(f"L={L}: QFI(n={N_SNAPSHOT}) = {traces[L].qfi[N_SNAPSHOT]:10.3f}   "
          f"QFI(n={CYCLES}) = {traces[L].qfi[CYCLES]:12.3f}")

L_big = max(SIZES)
fit_t = power_fit(traces[L_big].n[1:], traces[L_big].qfi[1:])
print(f"\ntime scaling at L={L_big}:  QFI ~ n^{fit_t.exponent:.3f} "
      f"(r^2 = {fit_t.r_squared:.5f})")

sizes = np.array(list(SIZES))
fit_l = power_fit(sizes, [traces[L].qfi[N_SNAPSHOT] for L in SIZES])
print(f"size scaling at n={N_SNAPSHOT}:  QFI ~ L^{fit_l.exponent:.3f} "
      f"(r^2 = {fit_l.r_squared:.5f})")

fit_l2 = power_fit(sizes, [traces[L].qfi[CYCLES] for L in SIZES])
print(f"size scaling at n={CYCLES}:  QFI ~ L^{fit_l2.exponent:.3f} "
      f"(r^2 = {fit_l2.r_squared:.5f})")

"""Hat-space norms along a nested knot ladder.

A function living in the kernel's native space has projected norms that
increase toward a finite limit; a discontinuous function sends them to
infinity.  This script prints both ladders side by side.
"""

import numpy as np

from constrained_gp import Kernel, norm_ladder, uniform_partition

kernel = Kernel("squared_exponential", sigma=25.0, theta=0.2)
ladder = [uniform_partition(N) for N in (4, 8, 16, 32, 64)]

# a kernel section: exactly representable, norm sigma^2 = 625
section = lambda x: kernel(x, 0.5)
# a jump at 1/2: outside the native space
step = lambda x: np.where(np.asarray(x) < 0.5, 0.0, 1.0)

seq_in = norm_ladder(section, ladder, kernel)
seq_out = norm_ladder(step, ladder, kernel)

print(f"{'N':>4} {'m_N(kernel section)':>22} {'m_N(step)':>14}")
for p, a, b in zip(ladder, seq_in.values, seq_out.values):
    print(f"{p.n_cells:>4} {a:>22.6f} {b:>14.4e}")

print()
print(f"kernel section: non-decreasing = {seq_in.is_nondecreasing()}, "
      f"limit sigma^2 = {kernel.sigma**2}")
print("step function: the sequence diverges -- the jump is not in the native space")

"""
Disorder averages two ways: Wick enumeration and Monte Carlo.

E tr(H^m) is a finite sum over Gaussian pairings of the m coupling slots,
with one q-subset per pair.  At n = 8 the sum is small enough to enumerate,
so we can hold it against a brute-force average over seeded instances.
"""

from sykbarvinok import (
    annealed_partition_series,
    annealed_trace_moment,
    monte_carlo_trace_moment,
    monte_carlo_two_replica,
    two_replica_moment,
)
from sykbarvinok.disorder import configuration_count

n, q = 8, 4
samples = 20_000

for m in (2, 4):
    exact = annealed_trace_moment(n, q, m)
    mean, se = monte_carlo_trace_moment(n, q, m, samples, seed=0)
    print(f"E tr(H^{m}): Wick {exact:.7f} from {configuration_count(n, q, m)} configurations, "
          f"Monte Carlo {mean:.7f} +- {se:.1e}")

# Two replicas: E[tr(H^2) tr(H^2)] includes pairings that cross between the traces.
joint = two_replica_moment(n, q, 2, 2)
apart = two_replica_moment(n, q, 2, 2, separated=True)
mean, se = monte_carlo_two_replica(n, q, 2, 2, samples, seed=0)
print(f"E[tr(H^2)^2]: Wick {joint:.7f}, Monte Carlo {mean:.7f} +- {se:.1e}")
print(f"  within-replica pairings only give (E tr H^2)^2 = {apart:.7f}")

# The annealed partition function is the exponential generating series of these moments.
for beta in (0.1, 0.3j, 0.2 + 0.2j):
    print(f"E Z({beta}) ~ {complex(annealed_partition_series(n, q, beta, K=6)):.8f}")

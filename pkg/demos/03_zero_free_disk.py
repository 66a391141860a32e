"""
Looking for partition-function zeros near beta = 0.

The estimator is only trustworthy while Z(beta) has no zeros in a disk
around the origin.  We scan |Z| on a grid over that disk for a handful of
instances, then check the scanner on a one-term Hamiltonian whose zeros
are known in closed form.
"""

import math

from sykbarvinok import (
    GridSpec,
    SparseOperator,
    make_string,
    radius_sheet,
    sample_instance,
    scan_annealed_zeros,
    scan_hamiltonian_zeros,
    scan_instance_zeros,
)

sheet = radius_sheet(q=4, L=4)
print("radii:", {k: round(v, 4) for k, v in sheet.to_dict().items() if isinstance(v, float)})

grid = GridSpec(center=0j, radius=sheet.whp_radius, resolution=41)
for seed in range(5):
    rep = scan_instance_zeros(sample_instance(12, 4, seed), grid=grid)
    print(f"seed {seed}: min |Z| = {rep.min_modulus:.5f} at beta = {rep.argmin:.4f}")

# H = J psi_{0123} has Z = cosh(beta J / 4), which vanishes at beta = 2 pi i / J.
J = 2.0
h = J * SparseOperator.from_terms(8, [make_string([0, 1, 2, 3], 8)])
rep = scan_hamiltonian_zeros(h, GridSpec(0j, 4.0, 81))
print(f"one-term control: min |Z| = {rep.min_modulus:.4f} at {rep.argmin:.3f}, expected {2 * math.pi / J:.3f}i")

# The annealed series is scanned with a tail estimate; a point counts as
# certified only when the truncated value beats twice that tail.
ann = scan_annealed_zeros(8, 4, grid=GridSpec(0j, sheet.annealed_radius, 41), K=6)
print(f"annealed: min |E Z| = {ann.min_modulus:.5f}, every point certified: {ann.all_certified}")

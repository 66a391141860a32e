"""Exact moments ``mu_r = tr(H^r)`` by repeated sparse multiplication."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .errors import NumericalContamination
from .majorana import DEFAULT_TERM_CAP, SparseOperator, normalized_trace, op_multiply

__all__ = ["MomentSequence", "power_trace_sequence", "write_moments_csv", "read_moments_csv"]

IMAG_TOLERANCE = 1e-10


@dataclass(frozen=True)
class MomentSequence:
    """Normalized power traces ``mu_0 .. mu_K`` of a Hermitian operator."""

    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def K(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, r):
        return self.values[r]

    def __len__(self) -> int:
        return len(self.values)


def power_trace_sequence(
    h: SparseOperator,
    K: int,
    *,
    term_cap: int = DEFAULT_TERM_CAP,
    meta: dict | None = None,
) -> MomentSequence:
    """Compute ``mu_r = tr(H^r)`` for ``r = 0..K`` in one pass.

    Only the current power ``P_r = P_{r-1} H`` is retained.  A relative
    imaginary residue above ``1e-10`` raises :class:`NumericalContamination`,
    since ``H`` is expected to be Hermitian.
    """
    if K < 0:
        raise ValueError(f"K must be nonnegative, got {K}")
    mu = np.empty(K + 1)
    mu[0] = 1.0
    power = SparseOperator.identity(h.n)
    # Upper bound on the operator norm; |tr(H^r)| never exceeds its r-th power.
    norm_bound = float(np.sum(np.abs(h.coeffs) * np.power(2.0, -0.5 * np.bitwise_count(h.masks))))
    for r in range(1, K + 1):
        power = op_multiply(power, h, term_cap=term_cap)
        t = normalized_trace(power)
        if abs(t.imag) > IMAG_TOLERANCE * max(abs(t.real), norm_bound**r):
            raise NumericalContamination(
                f"tr(H^{r}) has imaginary part {t.imag:.3e} (real part {t.real:.3e})"
            )
        mu[r] = t.real
    return MomentSequence(mu, dict(meta or {}, K=K, n=h.n))


def write_moments_csv(
    mu: MomentSequence,
    fp: TextIO | None = None,
    *,
    hex_floats: bool = False,
    reference: np.ndarray | None = None,
):
    """CSV with columns ``r, mu_r`` (plus ``dense_mu_r, rel_dev`` when ``reference`` is given)."""
    buf = io.StringIO() if fp is None else fp
    w = csv.writer(buf, lineterminator="\n")
    fmt = (lambda x: float(x).hex()) if hex_floats else (lambda x: f"{x:.17g}")
    header = ["r", "mu_r"]
    if reference is not None:
        header += ["dense_mu_r", "rel_dev"]
    w.writerow(header)
    for r, v in enumerate(mu.values):
        row = [r, fmt(v)]
        if reference is not None:
            ref = float(reference[r])
            row += [fmt(ref), fmt(abs(v - ref) / max(1.0, abs(ref)))]
        w.writerow(row)
    if fp is None:
        return buf.getvalue()


def read_moments_csv(fp: TextIO | str) -> MomentSequence:
    text = fp if isinstance(fp, str) else fp.read()
    rows = list(csv.DictReader(io.StringIO(text)))
    parse = lambda s: float.fromhex(s) if "0x" in s.lower() else float(s)
    return MomentSequence([parse(r["mu_r"]) for r in rows])

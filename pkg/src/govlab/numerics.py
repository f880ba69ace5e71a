"""Trailing-ones decomposition of odd integers and 2-adic valuation primitives.

Every odd integer x splits uniquely as

    x = sum(2**M for M in high_exponents) + 2**m - 1

where m is the length of the maximal run of trailing one-bits (the governor
index) and every high exponent is strictly above m.  All arithmetic is exact;
Python ints carry arbitrary precision, so no width limits apply anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass


def v2(x: int) -> int:
    """2-adic valuation: exponent of the largest power of 2 dividing x (x >= 1)."""
    if x <= 0:
        raise ValueError(f"v2 requires a positive integer, got {x}")
    return (x & -x).bit_length() - 1


def governor_index(x: int) -> int:
    """Length of the maximal trailing run of one-bits of odd x.

    Computed as v2(x + 1), which equals the trailing-ones count: the run of
    ones carries into a single power of two when 1 is added.
    """
    if x <= 0 or x % 2 == 0:
        raise ValueError(f"governor_index requires a positive odd integer, got {x}")
    return v2(x + 1)


@dataclass(frozen=True)
class GovernorForm:
    """Canonical decomposition of an odd integer.

    high_exponents: strictly ascending bit positions above the trailing run.
    governor_index: length m of the trailing run of one-bits (m >= 1).
    """

    high_exponents: tuple[int, ...]
    governor_index: int

    def __post_init__(self) -> None:
        m = self.governor_index
        if not isinstance(m, int) or m < 1:
            raise ValueError(f"governor index must be a positive integer, got {m}")
        prev = m
        for e in self.high_exponents:
            if not isinstance(e, int) or e <= prev:
                raise ValueError(
                    f"high exponents must be strictly ascending and above the "
                    f"governor index {m}, got {self.high_exponents}"
                )
            prev = e


def decompose(x: int) -> GovernorForm:
    """Split odd x into its high bit positions and trailing-ones length.

    The bits of x + 1 are exactly {m} plus the high exponents of x, so the
    decomposition falls out of one increment and a bit scan.
    """
    if x <= 0 or x % 2 == 0:
        raise ValueError(f"decompose requires a positive odd integer, got {x}")
    h = x + 1
    m = v2(h)
    highs = []
    h >>= m
    pos = m
    while h:
        if h & 1:
            highs.append(pos)
        h >>= 1
        pos += 1
    # lowest set bit of x+1 is 2^m itself, not a high exponent
    assert highs == [] or highs[0] == m
    return GovernorForm(high_exponents=tuple(highs[1:]), governor_index=m)


def reconstruct(form: GovernorForm) -> int:
    """Rebuild the odd integer sum(2^M) + 2^m - 1 from its decomposition."""
    x = (1 << form.governor_index) - 1
    for e in form.high_exponents:
        x += 1 << e
    return x


def trailing_ones(x: int) -> int:
    """Count trailing one-bits of x by direct bit inspection (x >= 1).

    Independent of governor_index; kept as the cross-check route for the
    identity m = v2(x + 1).
    """
    if x <= 0:
        raise ValueError(f"trailing_ones requires a positive integer, got {x}")
    n = 0
    while x & 1:
        n += 1
        x >>= 1
    return n

"""Portable deterministic random number generation.

Training must be reproducible bit-for-bit from a 64-bit seed, across
platforms and across reimplementations in other languages.  Python's own
``random`` module and numpy's generators do not promise a stable stream
across versions, so we carry our own generator: splitmix64 (Sebastiano
Vigna, 2015), a fixed-increment Weyl sequence passed through a 64-bit
finalizer.  It is tiny, full-period over 2**64 states, and widely
re-implemented, which makes seeds portable.

Stream contract used throughout the package:

* ``next_uint64`` advances the state by the golden-gamma increment and
  returns the mixed 64-bit word.
* ``next_unit`` maps the top 53 bits onto [0, 1).
* ``next_index(n)`` is ``floor(u * n)`` on that unit output, clamped to
  ``n - 1`` against float round-up.
* ``uniform(lo, hi)`` is ``lo + (hi - lo) * u``.

Each of the last three consumes exactly one ``next_uint64`` call.
"""

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream seeded with an arbitrary 64-bit integer."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_uint64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        # 53-bit mantissa: every double in [0, 1) is equally spaced.
        return (self.next_uint64() >> 11) * 2.0**-53

    def next_index(self, n: int) -> int:
        if n <= 0:
            raise ValueError("next_index needs a positive range, got %d" % n)
        i = int(self.next_unit() * n)
        return n - 1 if i >= n else i

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_unit()

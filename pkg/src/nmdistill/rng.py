"""SplitMix64, a 64-bit add-and-mix generator.

State advances by the golden-ratio increment ``0x9E3779B97F4A7C15``; each
output is the state passed through two xor-shift-multiply rounds with
multipliers ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB`` (shifts 30, 27,
31).  Doubles use the top 53 bits.  The sequence is fully determined by the
seed, so optimizer trajectories can be reproduced in any language.
"""

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return low + (high - low) * ((self.next_u64() >> 11) * 2.0**-53)

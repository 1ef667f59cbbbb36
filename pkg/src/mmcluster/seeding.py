"""Deterministic seed derivation.

All randomness in experiments flows from a single base seed.  Per-trial
seeds are derived with a splitmix64 step so results are reproducible
across platforms and independent of execution order.
"""

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(base_seed: int, index: int) -> int:
    """Derive the ``index``-th child seed from ``base_seed`` (splitmix64)."""
    z = (int(base_seed) + (int(index) + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64

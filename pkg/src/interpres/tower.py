"""Exact naturals that may be power towers of twos.

``TowerInt(depth, top)`` denotes ``2^2^...^2^top`` with ``depth`` twos; depth
0 is the plain integer ``top``.  Values are normalised so that exact numbers
stay exact while ``2**top`` fits below the cap, and a tower whose top is a
power of two beyond the cap is unfolded one level.  Comparison never
materialises a tower: it peels matching exponentials off both sides and
compares the exponent against a bit length.
"""

from __future__ import annotations

from functools import total_ordering

DEFAULT_CAP_BITS = 4096  # exact values stay below 2**4096


def _is_pow2(v: int) -> bool:
    return v > 0 and v & (v - 1) == 0


@total_ordering
class TowerInt:
    __slots__ = ("depth", "top", "cap_bits")

    def __init__(self, depth: int, top: int, cap_bits: int = DEFAULT_CAP_BITS):
        if depth < 0 or top < 0:
            raise ValueError("TowerInt needs depth >= 0 and top >= 0")
        while depth > 0 and top < cap_bits:
            top = 1 << top
            depth -= 1
        cap = 1 << cap_bits
        while top >= cap and _is_pow2(top):
            top = top.bit_length() - 1
            depth += 1
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "cap_bits", cap_bits)

    def __setattr__(self, *_):
        raise AttributeError("TowerInt is immutable")

    @classmethod
    def exact(cls, v: int, cap_bits: int = DEFAULT_CAP_BITS) -> "TowerInt":
        return cls(0, v, cap_bits)

    @classmethod
    def tower(cls, depth: int, top: int, cap_bits: int = DEFAULT_CAP_BITS) -> "TowerInt":
        return cls(depth, top, cap_bits)

    @property
    def is_exact(self) -> bool:
        return self.depth == 0

    def value(self) -> int:
        if self.depth:
            raise OverflowError(f"{self} is too large to materialise")
        return self.top

    def pow2(self) -> "TowerInt":
        return TowerInt(self.depth + 1, self.top, self.cap_bits)

    def __eq__(self, other):
        if isinstance(other, int):
            other = TowerInt.exact(other)
        if not isinstance(other, TowerInt):
            return NotImplemented
        return tower_cmp(self, other) == 0

    def __lt__(self, other):
        if isinstance(other, int):
            other = TowerInt.exact(other)
        return tower_cmp(self, other) < 0

    def __hash__(self):
        if self.depth == 0:
            return hash(self.top)
        return hash(("tower", self.depth, self.top))

    def __repr__(self):
        return f"TowerInt({self.depth}, {self.top})"

    def __str__(self):
        if self.depth == 0:
            return str(self.top)
        return f"2^^{self.depth}({self.top})"


def _cmp_int(a: int, b: int) -> int:
    return (a > b) - (a < b)


def _cmp(da: int, ta: int, db: int, tb: int) -> int:
    """Compare tower(da, ta) with tower(db, tb) exactly."""
    while True:
        if da == db:
            return _cmp_int(ta, tb)
        if da < db:
            return -_cmp(db, tb, da, ta)
        if db > 0:
            # 2^X vs 2^Y: compare exponents
            da, db = da - 1, db - 1
            continue
        # 2^X vs an exact v: with L = bitlen(v), 2^(L-1) <= v < 2^L
        if tb == 0:
            return 1
        L = tb.bit_length()
        c = _cmp(da - 1, ta, 0, L - 1)
        if c > 0:
            return 1      # X >= L, so 2^X >= 2^L > v
        if c < 0:
            return -1     # X < L-1, so 2^X < 2^(L-1) <= v
        return 0 if tb == 1 << (L - 1) else -1


def tower_cmp(a: TowerInt, b: TowerInt) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    return _cmp(a.depth, a.top, b.depth, b.top)


def parse_tower(text: str, cap_bits: int = DEFAULT_CAP_BITS) -> TowerInt:
    """Inverse of ``str``: a decimal or ``2^^d(top)``."""
    text = text.strip()
    if text.startswith("2^^"):
        d, rest = text[3:].split("(", 1)
        return TowerInt(int(d), int(rest.rstrip(")")), cap_bits)
    return TowerInt.exact(int(text), cap_bits)

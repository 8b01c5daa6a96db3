"""Value lattices for energy credits and parity progress measures."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Union


class _Top:
    """Greatest element of the energy and progress-measure lattices."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return 0x70B

    def __repr__(self):
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()

EnergyValue = Union[int, _Top]
Measure = Union[tuple, _Top]


def energy_bound(weights_by_state: Iterable[Iterable[int]]) -> int:
    """Sum over states of the largest single-step energy loss (0 if none)."""
    return sum(max([0] + [-w for w in ws]) for ws in weights_by_state)


def ominus(value: EnergyValue, weight: int, bound: int) -> EnergyValue:
    """Credit needed before a step of ``weight`` when ``value`` is needed after it."""
    if value is TOP:
        return TOP
    need = value - weight
    if need > bound:
        return TOP
    return max(0, need)


class ParityDomain:
    """Progress measures for a min-parity game with priorities ``0..d``.

    Measures are tuples of length ``d + 1``; even positions are always 0 and
    odd position ``i`` ranges over ``0..count(i)``.  ``TOP`` means player 1
    loses.  Tuple comparison gives the lexicographic order.
    """

    def __init__(self, priorities: Iterable[int]):
        priorities = list(priorities)
        self.d = max(priorities) if priorities else 0
        counts = Counter(priorities)
        self.bounds = tuple(counts[i] if i % 2 else 0 for i in range(self.d + 1))
        self.zero = (0,) * (self.d + 1)
        self.odd_positions = tuple(range(1, self.d + 1, 2))

    def __repr__(self):
        return f"ParityDomain(d={self.d}, bounds={self.bounds})"

    def prog(self, target: Measure, priority: int) -> Measure:
        """Least measure m with m >=_p target (p even) or m >_p target (p odd).

        Comparisons look at the prefix ``0..p`` only; positions after ``p``
        are reset to zero.
        """
        if target is TOP:
            return TOP
        k = priority
        if k % 2 == 0:
            return target[: k + 1] + (0,) * (self.d - k)
        head = list(target[: k + 1])
        for i in reversed(range(1, k + 1, 2)):
            if head[i] < self.bounds[i]:
                head[i] += 1
                for j in range(i + 1, k + 1):
                    head[j] = 0
                return tuple(head) + (0,) * (self.d - k)
        return TOP

    def is_member(self, m: Measure) -> bool:
        if m is TOP:
            return True
        return (len(m) == self.d + 1
                and all(0 <= m[i] <= self.bounds[i] for i in range(self.d + 1))
                and all(m[i] == 0 for i in range(0, self.d + 1, 2)))

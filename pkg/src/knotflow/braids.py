"""Artin braid words and the permutation-braid machinery.

A braid on n strands is stored as a sequence of signed generator indices:
the letter +i (1 <= i <= n-1) crosses the strand in position i over the
strand in position i+1, and -i is the inverse crossing.  Words compose left
to right.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("a braid needs at least one strand")
        object.__setattr__(self, "letters", tuple(int(l) for l in self.letters))
        for letter in self.letters:
            if letter == 0 or abs(letter) > self.strands - 1:
                raise ValueError(f"generator {letter} out of range for {self.strands} strands")

    @property
    def crossing_count(self) -> int:
        return len(self.letters)

    @property
    def exponent_sum(self) -> int:
        return sum(1 if l > 0 else -1 for l in self.letters)

    def is_positive(self) -> bool:
        return all(l > 0 for l in self.letters)

    def is_negative(self) -> bool:
        return all(l < 0 for l in self.letters)

    def permutation(self) -> tuple[int, ...]:
        """perm[i] = final position (0-based) of the strand entering at i."""
        position = list(range(self.strands))
        for letter in self.letters:
            j = abs(letter) - 1
            position[j], position[j + 1] = position[j + 1], position[j]
        # position[p] = strand now at slot p; invert to strand -> slot
        final = [0] * self.strands
        for slot, strand in enumerate(position):
            final[strand] = slot
        return tuple(final)

    def components(self) -> list[list[int]]:
        """Cycles of the closure permutation (strand indices, 0-based)."""
        perm = self.permutation()
        seen = [False] * self.strands
        cycles = []
        for start in range(self.strands):
            if seen[start]:
                continue
            cycle, cur = [], start
            while not seen[cur]:
                seen[cur] = True
                cycle.append(cur)
                cur = perm[cur]
            cycles.append(cycle)
        return cycles

    def is_knot(self) -> bool:
        return len(self.components()) == 1

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-l for l in reversed(self.letters)))

    def mirror(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-l for l in self.letters))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.strands != self.strands:
            raise ValueError("strand counts differ")
        return BraidWord(self.strands, self.letters + other.letters)

    def conjugated(self, generator: int) -> "BraidWord":
        """g b g^{-1} for a single signed generator g."""
        g = BraidWord(self.strands, (generator,))
        return g * self * g.inverse()

    def stabilized(self, sign: int = 1) -> "BraidWord":
        """Markov stabilization: append sigma_n^{sign} on one more strand."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        letters = self.letters + (sign * self.strands,)
        return BraidWord(self.strands + 1, letters)


def permutation_braid(targets: list[int], sign: int = 1) -> list[int]:
    """Positive (or negative) permutation braid realizing the target slots.

    ``targets[i]`` is the slot where the strand entering at slot i must
    exit; each inverting pair crosses exactly once, with the given sign.
    Emitted by bubble sort, so the letter count equals the inversion count.
    """
    n = len(targets)
    current = list(range(n))
    letters = []
    changed = True
    while changed:
        changed = False
        for j in range(n - 1):
            if targets[current[j]] > targets[current[j + 1]]:
                current[j], current[j + 1] = current[j + 1], current[j]
                letters.append(sign * (j + 1))
                changed = True
    return letters


def full_twist_block(start: int, size: int, power: int) -> list[int]:
    """Full twists on the strand block occupying slots start..start+size-1.

    One full twist is (sigma_start ... sigma_{start+size-2})^size; ``power``
    signed copies are emitted, negative powers as the inverse word.  Slots
    are 0-based; emitted generator indices are 1-based.
    """
    if size < 2 or power == 0:
        return []
    ring = [start + j + 1 for j in range(size - 1)]  # 1-based generator indices
    once = ring * size
    if power > 0:
        return once * power
    reversed_once = [-g for g in reversed(once)]
    return reversed_once * (-power)

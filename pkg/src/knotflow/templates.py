"""Lorenz-like branched-surface combinatorics.

A two-eared template is described by integer twist parameters (m, n) for
the x- and y-ear together with a flag for the reversed branchline crossing
(the starred family).  Its closed orbits correspond to aperiodic cyclic
words over {x, y}: the full shift on two symbols.  An orbit word becomes a
braid by sorting the cyclic rotations of the word (the branchline order),
letting the one-symbol shift permute them, and emitting the positive
permutation braid of that permutation, with every branch crossing carrying
the template's crossing sign and each ear contributing signed full twists
on its contiguous strand block.

Twist units are signed full twists (two strand-pair crossings per pair per
unit); for several words at once the rotations of all words are merged
into a single branchline order, which is what makes pairwise linking
numbers of distinct orbits computable from one braid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import lcm

from knotflow.braids import BraidWord, full_twist_block, permutation_braid
from knotflow.invariants import CurveGeometry, PLCurve, closure_curves

__all__ = [
    "CyclicWord",
    "PeriodicWord",
    "SameOrbit",
    "TemplateSpec",
    "Universality",
    "enumerate_words",
    "lorenz_like",
    "pair_linking",
    "universal_predicate",
    "word_to_braid",
    "word_to_curve",
    "words_to_curves",
]


class PeriodicWord(ValueError):
    """The word is a proper power and does not name a single closed orbit."""


class SameOrbit(ValueError):
    """Two words are rotations of each other, hence the same orbit."""


@dataclass(frozen=True)
class TemplateSpec:
    """Twist parameters of a two-eared template; starred reverses the
    branchline crossing."""

    m: int
    n: int
    starred: bool = False

    @property
    def crossing_sign(self) -> int:
        return -1 if self.starred else 1

    def mirror(self) -> "TemplateSpec":
        return TemplateSpec(-self.m, -self.n, not self.starred)


def lorenz_like(m: int, n: int, starred: bool = False) -> TemplateSpec:
    return TemplateSpec(int(m), int(n), bool(starred))


@dataclass(frozen=True)
class CyclicWord:
    """A cyclic word over {x, y}, stored as its least rotation."""

    canonical: str
    aperiodic: bool

    @classmethod
    def of(cls, word: str) -> "CyclicWord":
        if not word or set(word) - {"x", "y"}:
            raise ValueError(f"word must be nonempty over {{x, y}}: {word!r}")
        canonical = min(word[i:] + word[:i] for i in range(len(word)))
        period = (word + word).index(word, 1)
        return cls(canonical=canonical, aperiodic=period == len(word))

    def __len__(self):
        return len(self.canonical)

    def rotations(self) -> list[str]:
        w = self.canonical
        return [w[i:] + w[:i] for i in range(len(w))]

    def __str__(self):
        return self.canonical


def enumerate_words(max_len: int) -> list[CyclicWord]:
    """All aperiodic binary necklaces of length <= max_len.

    Canonical representatives are exactly the Lyndon words over x < y,
    generated by Duval's algorithm; output is sorted by (length, word).
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    alphabet = "xy"
    words = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m <= max_len:
            words.append("".join(alphabet[i] for i in w))
        while len(w) < max_len:
            w.append(w[-m])
        while w and w[-1] == len(alphabet) - 1:
            w.pop()
    words.sort(key=lambda s: (len(s), s))
    return [CyclicWord(canonical=s, aperiodic=True) for s in words]


class Universality(enum.Enum):
    UNIVERSAL = "Universal"
    NOT_UNIVERSAL = "NotUniversal"
    UNKNOWN = "Unknown"


def universal_predicate(m: int, n: int, starred: bool = False) -> Universality:
    """Whether the template carries every knot and link type.

    Decided only when m*n >= 0: the unstarred template is universal iff
    m*n = 0 and m + n < 0; the starred template is the mirror image of the
    unstarred (-m, -n) one and inherits its verdict.  The mixed-sign case
    is undecided and reported as UNKNOWN.
    """
    if m * n < 0:
        return Universality.UNKNOWN
    if starred:
        m, n = -m, -n
    if m * n == 0 and m + n < 0:
        return Universality.UNIVERSAL
    return Universality.NOT_UNIVERSAL


def _require_aperiodic(w: CyclicWord):
    if not w.aperiodic:
        raise PeriodicWord(f"{w.canonical!r} is a proper power")


def _merged_braid(spec: TemplateSpec, words: list[CyclicWord]):
    """Branchline braid of several orbits at once.

    Returns (braid, labels) where labels[i] is the index of the word whose
    rotation enters the braid at slot i.  Rotations are ordered by their
    infinite periodic expansions (comparison up to the lcm of the lengths
    decides every pair); the one-symbol shift gives the target slots.
    """
    for w in words:
        _require_aperiodic(w)
    horizon = lcm(*[len(w) for w in words])
    entries = []
    for ci, w in enumerate(words):
        for rot in w.rotations():
            key = (rot * (horizon // len(rot) + 1))[:horizon]
            entries.append((key, ci, rot))
    keys = [e[0] for e in entries]
    if len(set(keys)) != len(keys):
        raise SameOrbit("two words describe the same closed orbit")
    entries.sort()

    position = {(ci, rot): i for i, (_, ci, rot) in enumerate(entries)}
    targets = [
        position[(ci, rot[1:] + rot[0])] for (_, ci, rot) in entries
    ]
    labels = tuple(ci for (_, ci, rot) in entries)

    strands = len(entries)
    x_block = sum(1 for (key, _, _) in entries if key[0] == "x")
    letters = []
    letters += full_twist_block(0, x_block, spec.m)
    letters += full_twist_block(x_block, strands - x_block, spec.n)
    letters += permutation_braid(targets, spec.crossing_sign)
    return BraidWord(strands, tuple(letters)), labels


def word_to_braid(spec: TemplateSpec, w: CyclicWord) -> BraidWord:
    """Braid whose closure is the embedded orbit of the word."""
    braid, _ = _merged_braid(spec, [w])
    return braid


def pair_linking(spec: TemplateSpec, w1: CyclicWord, w2: CyclicWord) -> int:
    """Linking number of two distinct orbits: half the signed count of
    inter-component crossings of the merged branchline braid."""
    braid, labels = _merged_braid(spec, [w1, w2])
    slot_strand = list(range(braid.strands))
    total = 0
    for letter in braid.letters:
        j = abs(letter) - 1
        a, b = slot_strand[j], slot_strand[j + 1]
        if labels[a] != labels[b]:
            total += 1 if letter > 0 else -1
        slot_strand[j], slot_strand[j + 1] = b, a
    if total % 2 != 0:
        raise AssertionError("inter-component crossings must pair up")
    return total // 2


def words_to_curves(
    spec: TemplateSpec,
    words: list[CyclicWord],
    geometry: CurveGeometry | None = None,
) -> list[PLCurve]:
    """Joint embedding of several orbits as disjoint closed polylines.

    All orbits share one branchline order, so pairwise Gauss linking of
    the returned curves matches :func:`pair_linking`.
    """
    braid, labels = _merged_braid(spec, words)
    curves = closure_curves(braid, geometry)
    by_label = {}
    for cycle, curve in zip(braid.components(), curves):
        cycle_labels = {labels[i] for i in cycle}
        if len(cycle_labels) != 1:
            raise AssertionError("braid component mixes orbit words")
        by_label[cycle_labels.pop()] = curve
    return [by_label[i] for i in range(len(words))]


def word_to_curve(
    spec: TemplateSpec, w: CyclicWord, geometry: CurveGeometry | None = None
) -> PLCurve:
    """Embedded closed polyline of a single orbit."""
    return words_to_curves(spec, [w], geometry)[0]

"""Mode occupations, mode assignments and permutations of particle labels.

Conventions
-----------
Modes and particle slots are 0-based inside the package. Cycle notation
strings such as ``"(13)"`` are 1-based, matching how permutations are usually
written down by hand and in state files.

A permutation ``p`` acts on a tuple by ``apply(p, t)[i] == t[p(i)]``. With
``compose(a, b) == a o b`` this gives ``apply(compose(a, b), t) ==
apply(b, apply(a, t))``: the left factor is applied to the tuple first.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .config import LIMITS
from .errors import CapExceeded


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``{0, ..., N-1}`` stored as its image sequence."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {self.images!r}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, text: str, n: int) -> "Permutation":
        """Parse 1-based cycle notation, e.g. ``"(13)"``, ``"(12)(34)"`` or ``"(1 10)"``.

        The identity may be written as ``""``, ``"e"``, ``"id"`` or ``"ε"``.
        Labels are single digits unless separated by spaces or commas.
        """
        text = text.strip()
        if text in ("", "e", "id", "ε", "()"):
            return cls.identity(n)
        if not re.fullmatch(r"(\([0-9 ,]*\))+", text):
            raise ValueError(f"malformed cycle notation: {text!r}")
        perm = cls.identity(n)
        # adjacent cycles compose right-to-left, as functions
        for body in reversed(re.findall(r"\(([0-9 ,]*)\)", text)):
            body = body.strip()
            if re.search(r"[ ,]", body):
                labels = [int(x) for x in re.split(r"[ ,]+", body) if x]
            else:
                labels = [int(c) for c in body]
            if len(set(labels)) != len(labels):
                raise ValueError(f"repeated label in cycle ({body})")
            cyc = list(range(n))
            for a, b in zip(labels, labels[1:] + labels[:1]):
                if not 1 <= a <= n:
                    raise ValueError(f"label {a} out of range 1..{n}")
                cyc[a - 1] = b - 1
            perm = compose(cls(tuple(cyc)), perm)
        return perm

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return invert(self)

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(self.n):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    @property
    def sign(self) -> int:
        n_cycles = len(self.cycles())
        return -1 if (self.n - n_cycles) % 2 else 1

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def __str__(self) -> str:
        nontrivial = [c for c in self.cycles() if len(c) > 1]
        if not nontrivial:
            return "ε"
        sep = " " if self.n > 9 else ""
        return "".join("(" + sep.join(str(i + 1) for i in c) + ")" for c in nontrivial)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Return ``a o b``, i.e. ``i -> a(b(i))``."""
    if a.n != b.n:
        raise ValueError(f"cannot compose permutations of {a.n} and {b.n} points")
    return Permutation(tuple(a.images[j] for j in b.images))


def invert(a: Permutation) -> Permutation:
    inv = [0] * a.n
    for i, j in enumerate(a.images):
        inv[j] = i
    return Permutation(tuple(inv))


def apply(a: Permutation, t: Sequence) -> tuple:
    """Permute the entries of ``t``: ``result[i] = t[a(i)]``."""
    if len(t) != a.n:
        raise ValueError(f"tuple of length {len(t)} for permutation on {a.n} points")
    return tuple(t[j] for j in a.images)


def all_permutations(n: int, *, cap: int | None = None) -> list[Permutation]:
    cap = LIMITS.max_group_order if cap is None else cap
    if math.factorial(n) > cap:
        raise CapExceeded(f"{n}! = {math.factorial(n)} exceeds enumeration cap {cap}")
    return [Permutation(p) for p in itertools.permutations(range(n))]


@dataclass(frozen=True)
class ModeOccupation:
    """Particle count per external mode."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 1:
            raise ValueError("need at least one mode")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative occupation in {counts}")
        if sum(counts) < 1:
            raise ValueError("need at least one particle")
        object.__setattr__(self, "counts", counts)

    @property
    def n_modes(self) -> int:
        return len(self.counts)

    @property
    def n_particles(self) -> int:
        return sum(self.counts)

    @property
    def r_count(self) -> int:
        """Number of inequivalent particle labelings, N! / prod(R_j!)."""
        return math.factorial(self.n_particles) // self.stabilizer_order

    @property
    def stabilizer_order(self) -> int:
        return math.prod(math.factorial(c) for c in self.counts)

    def is_singly_occupied(self) -> bool:
        return all(c <= 1 for c in self.counts)

    def blocks(self) -> list[range]:
        """Slot ranges of the canonical assignment that share a mode (empty modes skipped)."""
        out, start = [], 0
        for c in self.counts:
            if c:
                out.append(range(start, start + c))
            start += c
        return out


def canonical_assignment(occ: ModeOccupation) -> tuple[int, ...]:
    """Non-decreasing mode assignment realizing ``occ``."""
    return tuple(j for j, c in enumerate(occ.counts) for _ in range(c))


def occupation_of(assignment: Sequence[int], n_modes: int) -> ModeOccupation:
    counts = [0] * n_modes
    for e in assignment:
        counts[e] += 1
    return ModeOccupation(tuple(counts))


def assignment_index(assignment: Sequence[int], n_modes: int) -> int:
    """Row index of ``|e_1, ..., e_N>`` in the Kronecker-ordered ``n**N`` basis."""
    idx = 0
    for e in assignment:
        idx = idx * n_modes + e
    return idx


def stabilizer(occ: ModeOccupation, *, cap: int | None = None) -> list[Permutation]:
    """All permutations that only reorder slots within equal-mode blocks."""
    cap = LIMITS.max_group_order if cap is None else cap
    if occ.stabilizer_order > cap:
        raise CapExceeded(f"|S_R| = {occ.stabilizer_order} exceeds cap {cap}")
    blocks = occ.blocks()
    n = occ.n_particles
    out = []
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        images = [0] * n
        for block, perm in zip(blocks, choice):
            for i, j in zip(block, perm):
                images[i] = j
        out.append(Permutation(tuple(images)))
    return sorted(out, key=lambda p: p.images)


def _multiset_permutations(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct orderings of a multiset in lexicographic order."""
    a = sorted(items)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def _smallest_rep(target: Sequence[int], canonical: Sequence[int]) -> Permutation:
    # smallest p with canonical[p(i)] == target[i]: fill each mode block in order
    next_slot = {}
    for slot, mode in enumerate(canonical):
        next_slot.setdefault(mode, slot)
    images = []
    for mode in target:
        images.append(next_slot[mode])
        next_slot[mode] += 1
    return Permutation(tuple(images))


@dataclass(frozen=True)
class Transversal:
    """One representative per right coset ``S_R p`` of the stabilizer in S_N.

    Each coset is represented by its lexicographically smallest element and
    the representatives are sorted lexicographically by image sequence.
    """

    reps: tuple[Permutation, ...]
    occupation: ModeOccupation

    @property
    def r_count(self) -> int:
        return len(self.reps)

    @property
    def assignments(self) -> tuple[tuple[int, ...], ...]:
        e = canonical_assignment(self.occupation)
        return tuple(apply(mu, e) for mu in self.reps)

    def __iter__(self):
        return iter(self.reps)

    def __len__(self):
        return len(self.reps)

    def __getitem__(self, i):
        return self.reps[i]

    def index(self, perm: Permutation) -> int:
        """Position of the representative whose coset contains ``perm``."""
        e = canonical_assignment(self.occupation)
        return self.assignments.index(apply(perm, e))


@lru_cache(maxsize=256)
def _transversal_cached(counts: tuple[int, ...], cap: int) -> Transversal:
    occ = ModeOccupation(counts)
    if occ.r_count > cap:
        raise CapExceeded(f"R = {occ.r_count} labelings exceeds cap {cap}")
    e = canonical_assignment(occ)
    reps = tuple(_smallest_rep(t, e) for t in _multiset_permutations(e))
    return Transversal(reps, occ)


def right_transversal(occ: ModeOccupation, *, cap: int | None = None) -> Transversal:
    cap = LIMITS.max_transversal if cap is None else cap
    return _transversal_cached(occ.counts, cap)


def enumerate_occupations(n_modes: int, n_particles: int, *, cap: int | None = None) -> list[ModeOccupation]:
    """All occupations of ``n_particles`` in ``n_modes``, in descending lexicographic order."""
    if n_modes < 1 or n_particles < 1:
        raise ValueError("need n_modes >= 1 and n_particles >= 1")
    cap = LIMITS.max_occupations if cap is None else cap
    total = math.comb(n_particles + n_modes - 1, n_modes - 1)
    if total > cap:
        raise CapExceeded(f"{total} occupations exceeds cap {cap}")

    def rec(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining, -1, -1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    return [ModeOccupation(c) for c in rec(n_particles, n_modes)]

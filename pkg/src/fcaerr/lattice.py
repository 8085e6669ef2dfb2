"""Closure systems, concept enumeration and lattice export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .context import FormalContext, bits, extent_of, full_mask

DEFAULT_CAP = 1_000_000


class IntractableError(RuntimeError):
    """Enumeration stopped because it produced more closed sets than allowed."""

    def __init__(self, cap: int, what: str = "concepts"):
        super().__init__(f"more than {cap} {what}; raise the cap to compute them")
        self.cap = cap


def canonical_key(mask: int):
    return (mask.bit_count(), bits(mask))


@dataclass(frozen=True)
class ClosureSystem:
    """A family of subsets of ``{0..n-1}`` that contains the ground set and is closed under intersection.

    Members are held in canonical order (by size, then by sorted index
    tuple). The constructor only deduplicates and sorts; use
    :meth:`checked` to also verify the closure properties.
    """

    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members), key=canonical_key)))

    @classmethod
    def checked(cls, n: int, members: Iterable[int]) -> "ClosureSystem":
        cs = cls(n, tuple(members))
        problem = cs.violation()
        if problem:
            raise ValueError(problem)
        return cs

    def violation(self) -> str | None:
        """Describe the first broken closure-system property, or return None."""
        ground = full_mask(self.n)
        fam = set(self.members)
        if any(m < 0 or m & ~ground for m in fam):
            return "member outside the ground set"
        if ground not in fam:
            return "ground set missing"
        ms = self.members
        for i, a in enumerate(ms):
            for b in ms[i + 1:]:
                if a & b not in fam:
                    return f"{bits(a)} & {bits(b)} = {bits(a & b)} missing"
        return None

    @property
    def ground(self) -> int:
        return full_mask(self.n)

    @cached_property
    def as_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, mask) -> bool:
        return mask in self.as_set

    def __le__(self, other: "ClosureSystem") -> bool:
        return self.n == other.n and self.as_set <= other.as_set

    def closure(self, A: int) -> int:
        """Smallest member containing ``A``."""
        out = self.ground
        for m in self.members:
            if A & ~m == 0:
                out &= m
        return out

    def to_json(self, objects: Sequence[str]) -> str:
        return json.dumps([[objects[i] for i in bits(m)] for m in self.members])

    @classmethod
    def from_json(cls, text: str, objects: Sequence[str]) -> "ClosureSystem":
        index = {g: i for i, g in enumerate(objects)}
        fam = []
        for names in json.loads(text):
            m = 0
            for g in names:
                m |= 1 << index[g]
            fam.append(m)
        return cls.checked(len(objects), fam)


def _close_by_one(ctx: FormalContext, cap: int | None) -> list[tuple[int, int]]:
    # Close-by-One over objects: a child (A + g)'' is kept only when it adds
    # no object with index below g, so each extent is generated exactly once.
    n = ctx.n_objects
    rows = ctx.rows
    B0 = ctx.all_attributes
    A0 = extent_of(ctx, B0)
    out = []
    stack = [(A0, B0, 0)]
    while stack:
        A, B, start = stack.pop()
        out.append((A, B))
        if cap is not None and len(out) > cap:
            raise IntractableError(cap)
        children = []
        for j in range(start, n):
            if A >> j & 1:
                continue
            D = B & rows[j]
            C = extent_of(ctx, D)
            low = (1 << j) - 1
            if C & low == A & low:
                children.append((C, D, j + 1))
        stack.extend(reversed(children))
    return out


def extents(ctx: FormalContext, cap: int | None = DEFAULT_CAP) -> ClosureSystem:
    return ClosureSystem(ctx.n_objects, tuple(A for A, _ in _close_by_one(ctx, cap)))


def count_concepts(ctx: FormalContext, cap: int | None = DEFAULT_CAP) -> int:
    return len(_close_by_one(ctx, cap))


@dataclass(frozen=True)
class Concept:
    extent: int
    intent: int


@dataclass(frozen=True)
class ConceptLattice:
    """Concepts in canonical extent order (bottom first) and their cover pairs ``(lower, upper)``."""

    context: FormalContext
    concepts: tuple[Concept, ...]
    covers: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.concepts)

    def index_of(self, extent: int) -> int:
        for i, c in enumerate(self.concepts):
            if c.extent == extent:
                return i
        raise KeyError(f"{bits(extent)} is not an extent of this lattice")

    def extents(self) -> ClosureSystem:
        return ClosureSystem(self.context.n_objects, tuple(c.extent for c in self.concepts))

    def upper_covers(self, i: int) -> list[int]:
        return [u for l, u in self.covers if l == i]

    def lower_covers(self, i: int) -> list[int]:
        return [l for l, u in self.covers if u == i]


def _upper_covers(ctx: FormalContext, A: int, B: int) -> list[int]:
    # (A + g)'' is an upper neighbour of A iff every object it adds generates it
    counts: dict[int, int] = {}
    rest = ctx.all_objects & ~A
    rows = ctx.rows
    g_mask = rest
    while g_mask:
        low = g_mask & -g_mask
        g_mask ^= low
        C = extent_of(ctx, B & rows[low.bit_length() - 1])
        counts[C] = counts.get(C, 0) + 1
    size = A.bit_count()
    return [C for C, k in counts.items() if k == C.bit_count() - size]


def concepts(ctx: FormalContext, cap: int | None = DEFAULT_CAP) -> ConceptLattice:
    """All formal concepts of ``ctx`` together with the cover relation.

    Raises :class:`IntractableError` when more than ``cap`` concepts exist.
    """
    found = _close_by_one(ctx, cap)
    found.sort(key=lambda c: canonical_key(c[0]))
    index = {A: i for i, (A, _) in enumerate(found)}
    covers = []
    for i, (A, B) in enumerate(found):
        for C in _upper_covers(ctx, A, B):
            covers.append((i, index[C]))
    covers.sort()
    return ConceptLattice(ctx, tuple(Concept(A, B) for A, B in found), tuple(covers))


def intersection_close(family: Iterable[int], n: int) -> ClosureSystem:
    """Smallest closure system on ``n`` objects containing every set in ``family``."""
    ground = full_mask(n)
    closed = {ground}
    for F in family:
        if F < 0 or F & ~ground:
            raise ValueError(f"set {F:#x} is not indexed against {n} objects")
        if F in closed:
            continue
        closed |= {F & X for X in closed}
    return ClosureSystem(n, tuple(closed))


def meet_irreducibles(cs: ClosureSystem) -> list[int]:
    """Members that are not the intersection of the members strictly above them (ground set excluded)."""
    ground = cs.ground
    ms = cs.members  # sorted by size, so strict supersets come later
    out = []
    for i, A in enumerate(ms):
        if A == ground:
            continue
        above = ground
        for C in ms[i + 1:]:
            if C != A and A & ~C == 0:
                above &= C
                if above == A:
                    break
        if above != A:
            out.append(A)
    return out


def family_context(cs: ClosureSystem, objects: Sequence[str],
                   label: Callable[[int], str] | None = None) -> FormalContext:
    """A context whose extents are exactly ``cs``: one attribute per meet-irreducible member."""
    if len(objects) != cs.n:
        raise ValueError("object list does not match the ground set")
    irr = meet_irreducibles(cs)
    label = label or (lambda m: "{" + ",".join(objects[i] for i in bits(m)) + "}")
    names = [label(m) for m in irr]
    seen: dict[str, int] = {}
    unique = []
    for nm in names:
        seen[nm] = seen.get(nm, 0) + 1
        unique.append(nm if seen[nm] == 1 else f"{nm}#{seen[nm]}")
    rows = [0] * cs.n
    for j, m in enumerate(irr):
        for g in bits(m):
            rows[g] |= 1 << j
    return FormalContext(tuple(objects), tuple(unique), tuple(rows))


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def export_dot(lat: ConceptLattice, highlight: Iterable[int] = (), labeling: str = "reduced",
               name: str = "lattice") -> str:
    """Render ``lat`` as a DOT digraph drawn bottom-up; extents in ``highlight`` are colored red."""
    if labeling not in ("reduced", "full"):
        raise ValueError("labeling must be 'reduced' or 'full'")
    ctx = lat.context
    index = {c.extent: i for i, c in enumerate(lat.concepts)}
    red = set()
    for A in highlight:
        if A not in index:
            raise ValueError(f"highlighted set {ctx.object_names(A)} is not an extent of the lattice")
        red.add(index[A])

    obj_at: dict[int, list[str]] = {}
    att_at: dict[int, list[str]] = {}
    if labeling == "reduced":
        for g, row in enumerate(ctx.rows):
            obj_at.setdefault(index[extent_of(ctx, row)], []).append(ctx.objects[g])
        for m, col in enumerate(ctx.cols):
            att_at.setdefault(index[col], []).append(ctx.attributes[m])

    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;",
             '  node [shape=box, style="rounded"];']
    for i, c in enumerate(lat.concepts):
        if labeling == "full":
            top = ", ".join(ctx.attribute_names(c.intent))
            bottom = ", ".join(ctx.object_names(c.extent))
        else:
            top = ", ".join(att_at.get(i, []))
            bottom = ", ".join(obj_at.get(i, []))
        attrs = [f"label={_quote(top + chr(10) + bottom if top and bottom else top or bottom)}"]
        if i in red:
            attrs.append("color=red")
            attrs.append("fontcolor=red")
        lines.append(f"  c{i} [{', '.join(attrs)}];")
    for lo, up in lat.covers:
        lines.append(f"  c{lo} -> c{up};")
    lines.append("}")
    return "\n".join(lines) + "\n"

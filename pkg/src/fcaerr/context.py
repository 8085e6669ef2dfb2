"""Formal contexts and their derivation operators.

Object and attribute sets are plain Python ints used as bitsets: bit ``i`` of
an object set stands for ``ctx.objects[i]``. The incidence is kept twice,
once as one bitmask per object row and once as one bitmask per attribute
column, so both derivations reduce to a chain of ``&`` operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def full_mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True, eq=False)
class FormalContext:
    """A formal context ``(G, M, I)``.

    Build one with :meth:`from_rows`, :meth:`from_matrix` or
    :meth:`from_sets`; the constructor expects the packed row masks.
    """

    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    rows: tuple[int, ...]
    cols: tuple[int, ...] = field(init=False, repr=False)
    name: str = ""

    def __post_init__(self):
        objects = tuple(self.objects)
        attributes = tuple(self.attributes)
        rows = tuple(int(r) for r in self.rows)
        if not objects:
            raise ValueError("a formal context needs at least one object")
        if len(set(objects)) != len(objects):
            raise ValueError("object names must be unique")
        if len(set(attributes)) != len(attributes):
            raise ValueError("attribute names must be unique")
        if len(rows) != len(objects):
            raise ValueError(f"{len(rows)} incidence rows for {len(objects)} objects")
        width = full_mask(len(attributes))
        for g, r in enumerate(rows):
            if r < 0 or r & ~width:
                raise ValueError(f"row of object {objects[g]!r} exceeds {len(attributes)} attributes")
        cols = [0] * len(attributes)
        for g, r in enumerate(rows):
            for m in bits(r):
                cols[m] |= 1 << g
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", tuple(cols))

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, objects: Sequence[str], attributes: Sequence[str],
                  rows: Sequence[int], name: str = "") -> "FormalContext":
        return cls(tuple(objects), tuple(attributes), tuple(rows), name=name)

    @classmethod
    def from_matrix(cls, objects: Sequence[str], attributes: Sequence[str],
                    matrix, name: str = "") -> "FormalContext":
        arr = np.asarray(matrix, dtype=bool)
        if arr.ndim != 2 or arr.shape != (len(objects), len(attributes)):
            raise ValueError(
                f"incidence shape {arr.shape} does not match "
                f"{len(objects)} objects x {len(attributes)} attributes")
        rows = [mask_of(np.flatnonzero(r).tolist()) for r in arr]
        return cls(tuple(objects), tuple(attributes), tuple(rows), name=name)

    @classmethod
    def from_sets(cls, incidence: dict[str, Iterable[str]],
                  attributes: Sequence[str] | None = None, name: str = "") -> "FormalContext":
        """Build from ``{object: attributes it has}``; attribute order is first-seen unless given."""
        if attributes is None:
            seen: dict[str, None] = {}
            for atts in incidence.values():
                for a in atts:
                    seen.setdefault(a, None)
            attributes = list(seen)
        index = {a: i for i, a in enumerate(attributes)}
        rows = [mask_of(index[a] for a in atts) for atts in incidence.values()]
        return cls(tuple(incidence), tuple(attributes), tuple(rows), name=name)

    # -- shape and conversions ----------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def all_objects(self) -> int:
        return full_mask(len(self.objects))

    @property
    def all_attributes(self) -> int:
        return full_mask(len(self.attributes))

    @property
    def n_incidences(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    @property
    def density(self) -> float:
        cells = self.n_objects * self.n_attributes
        return self.n_incidences / cells if cells else 0.0

    def to_matrix(self) -> np.ndarray:
        out = np.zeros((self.n_objects, self.n_attributes), dtype=bool)
        for g, r in enumerate(self.rows):
            out[g, bits(r)] = True
        return out

    def object_set(self, names: Iterable[str]) -> int:
        index = {g: i for i, g in enumerate(self.objects)}
        try:
            return mask_of(index[n] for n in names)
        except KeyError as exc:
            raise KeyError(f"unknown object {exc.args[0]!r}") from None

    def attribute_set(self, names: Iterable[str]) -> int:
        index = {m: i for i, m in enumerate(self.attributes)}
        try:
            return mask_of(index[n] for n in names)
        except KeyError as exc:
            raise KeyError(f"unknown attribute {exc.args[0]!r}") from None

    def object_names(self, mask: int) -> list[str]:
        return [self.objects[i] for i in bits(mask)]

    def attribute_names(self, mask: int) -> list[str]:
        return [self.attributes[i] for i in bits(mask)]

    def same_as(self, other: "FormalContext") -> bool:
        """Equality of object list, attribute list and incidence."""
        return (self.objects == other.objects and self.attributes == other.attributes
                and self.rows == other.rows)

    def __eq__(self, other):
        if not isinstance(other, FormalContext):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self):
        return hash((self.objects, self.attributes, self.rows))

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (f"<FormalContext{label} {self.n_objects}x{self.n_attributes}, "
                f"{self.n_incidences} incidences>")


def _check_objects(ctx: FormalContext, A: int) -> None:
    if A < 0 or A & ~ctx.all_objects:
        raise ValueError(f"object set {A:#x} is not indexed against {ctx.n_objects} objects")


def _check_attributes(ctx: FormalContext, B: int) -> None:
    if B < 0 or B & ~ctx.all_attributes:
        raise ValueError(f"attribute set {B:#x} is not indexed against {ctx.n_attributes} attributes")


def intent_of(ctx: FormalContext, A: int) -> int:
    # unchecked variant of derive_objects for inner loops
    B = ctx.all_attributes
    rows = ctx.rows
    while A and B:
        low = A & -A
        B &= rows[low.bit_length() - 1]
        A ^= low
    return B


def extent_of(ctx: FormalContext, B: int) -> int:
    A = ctx.all_objects
    cols = ctx.cols
    while B and A:
        low = B & -B
        A &= cols[low.bit_length() - 1]
        B ^= low
    return A


def derive_objects(ctx: FormalContext, A: int) -> int:
    """Attributes shared by every object in ``A`` (all attributes for ``A = 0``)."""
    _check_objects(ctx, A)
    return intent_of(ctx, A)


def derive_attributes(ctx: FormalContext, B: int) -> int:
    """Objects having every attribute in ``B`` (all objects for ``B = 0``)."""
    _check_attributes(ctx, B)
    return extent_of(ctx, B)


def closure_objects(ctx: FormalContext, A: int) -> int:
    _check_objects(ctx, A)
    return extent_of(ctx, intent_of(ctx, A))


def closure_attributes(ctx: FormalContext, B: int) -> int:
    _check_attributes(ctx, B)
    return intent_of(ctx, extent_of(ctx, B))


def is_extent(ctx: FormalContext, A: int) -> bool:
    return closure_objects(ctx, A) == A


def apposition(k1: FormalContext, k2: FormalContext, tags: tuple[str, str] = ("#1", "#2")) -> FormalContext:
    """Place ``k2``'s attributes next to ``k1``'s on the shared object list.

    Colliding attribute names get the suffixes in ``tags``; all other names
    are kept.
    """
    if k1.objects != k2.objects:
        raise ValueError("apposition needs identical object lists (same names, same order)")
    clash = set(k1.attributes) & set(k2.attributes)
    left = [m + tags[0] if m in clash else m for m in k1.attributes]
    right = [m + tags[1] if m in clash else m for m in k2.attributes]
    if len(set(left) | set(right)) != len(left) + len(right):
        raise ValueError("attribute names still collide after tagging")
    shift = k1.n_attributes
    rows = [r1 | (r2 << shift) for r1, r2 in zip(k1.rows, k2.rows)]
    return FormalContext(k1.objects, tuple(left + right), tuple(rows))


def induced_subcontext(ctx: FormalContext, H: int, N: int) -> FormalContext:
    """Restriction of the incidence to objects ``H`` and attributes ``N``."""
    _check_objects(ctx, H)
    _check_attributes(ctx, N)
    keep_g = bits(H)
    keep_m = bits(N)
    if not keep_g:
        raise ValueError("induced sub-context needs at least one object")
    rows = []
    for g in keep_g:
        r = ctx.rows[g]
        rows.append(mask_of(j for j, m in enumerate(keep_m) if r >> m & 1))
    return FormalContext(tuple(ctx.objects[g] for g in keep_g),
                         tuple(ctx.attributes[m] for m in keep_m), tuple(rows))


@dataclass(frozen=True)
class ObjectMap:
    """Total map from source object indices to target object indices."""

    image: tuple[int, ...]
    n_target: int

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(t) for t in self.image))
        for g, t in enumerate(self.image):
            if not 0 <= t < self.n_target:
                raise ValueError(f"object {g} maps to {t}, outside 0..{self.n_target - 1}")

    @classmethod
    def identity(cls, n: int) -> "ObjectMap":
        return cls(tuple(range(n)), n)

    @classmethod
    def by_name(cls, source: FormalContext, target: FormalContext,
                mapping: dict[str, str] | None = None) -> "ObjectMap":
        """Map objects by name; with ``mapping`` omitted each object maps to its namesake."""
        index = {g: i for i, g in enumerate(target.objects)}
        image = []
        for g in source.objects:
            t = mapping[g] if mapping is not None else g
            if t not in index:
                raise KeyError(f"object {g!r} has no image {t!r} in the target context")
            image.append(index[t])
        return cls(tuple(image), target.n_objects)

    def __len__(self):
        return len(self.image)

    def fibers(self) -> list[int]:
        """For each target object, the mask of source objects mapped onto it."""
        out = [0] * self.n_target
        for g, t in enumerate(self.image):
            out[t] |= 1 << g
        return out

    def preimage(self, A: int, fibers: list[int] | None = None) -> int:
        fibers = self.fibers() if fibers is None else fibers
        out = 0
        for t in bits(A):
            out |= fibers[t]
        return out


def _check_map(k: FormalContext, s: FormalContext, sigma: ObjectMap) -> None:
    if len(sigma) != k.n_objects:
        raise ValueError(f"map covers {len(sigma)} objects, context has {k.n_objects}")
    if sigma.n_target != s.n_objects:
        raise ValueError(f"map targets {sigma.n_target} objects, scale has {s.n_objects}")


def sigma_context(k: FormalContext, s: FormalContext, sigma: ObjectMap) -> FormalContext:
    """Objects of ``k`` described by the scale attributes of their images."""
    _check_map(k, s, sigma)
    rows = tuple(s.rows[t] for t in sigma.image)
    return FormalContext(k.objects, s.attributes, rows)

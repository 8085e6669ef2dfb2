"""Scale-measures: maps whose scale extents pull back to extents of the base context.

A scale-measure is identified up to equivalence by the closure system of
preimages it reflects, so comparisons and joins below work on that family
and never compare scale contexts syntactically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .context import FormalContext, ObjectMap, _check_map, bits, extent_of, intent_of
from .lattice import DEFAULT_CAP, ClosureSystem, extents, intersection_close, meet_irreducibles


@dataclass(frozen=True)
class ScaleMeasure:
    base: FormalContext
    scale: FormalContext
    map: ObjectMap

    def __post_init__(self):
        _check_map(self.base, self.scale, self.map)

    @classmethod
    def identity(cls, base: FormalContext, scale: FormalContext) -> "ScaleMeasure":
        """Pair ``base`` and ``scale`` by object name."""
        return cls(base, scale, ObjectMap.by_name(base, scale))

    def reflected(self, cap: int | None = DEFAULT_CAP) -> ClosureSystem:
        return reflected_extents(self.base, self.scale, self.map, cap)

    def verify(self) -> "Verdict":
        return is_scale_measure(self.base, self.scale, self.map)


class Verdict(NamedTuple):
    holds: bool
    witness: int | None  # index of a scale attribute whose extent does not pull back

    def __bool__(self):
        return self.holds


def reflected_extents(k: FormalContext, s: FormalContext, sigma: ObjectMap,
                      cap: int | None = DEFAULT_CAP) -> ClosureSystem:
    """The family of preimages of all extents of ``s``, as a closure system on the objects of ``k``."""
    _check_map(k, s, sigma)
    fibers = sigma.fibers()
    return ClosureSystem(k.n_objects, tuple({sigma.preimage(A, fibers) for A in extents(s, cap)}))


def attribute_preimages(k: FormalContext, s: FormalContext, sigma: ObjectMap) -> list[int]:
    _check_map(k, s, sigma)
    fibers = sigma.fibers()
    return [sigma.preimage(col, fibers) for col in s.cols]


def is_scale_measure(k: FormalContext, s: FormalContext, sigma: ObjectMap) -> Verdict:
    """Decide the measure property from attribute extents alone.

    Every scale extent is an intersection of attribute extents and preimages
    commute with intersections, so checking the attribute columns suffices.
    """
    for m, A in enumerate(attribute_preimages(k, s, sigma)):
        if extent_of(k, intent_of(k, A)) != A:
            return Verdict(False, m)
    return Verdict(True, None)


def _require_verified(sm: ScaleMeasure) -> None:
    verdict = sm.verify()
    if not verdict:
        raise ValueError(f"not a scale-measure: scale attribute "
                         f"{sm.scale.attributes[verdict.witness]!r} pulls back to a non-extent")


def finer_than(sm1: ScaleMeasure, sm2: ScaleMeasure, cap: int | None = DEFAULT_CAP) -> bool:
    """True when every extent reflected by ``sm2`` is also reflected by ``sm1``."""
    if not sm1.base.same_as(sm2.base):
        raise ValueError("scale-measures of different base contexts are not comparable")
    _require_verified(sm1)
    _require_verified(sm2)
    return sm2.reflected(cap) <= sm1.reflected(cap)


def equivalent(sm1: ScaleMeasure, sm2: ScaleMeasure, cap: int | None = DEFAULT_CAP) -> bool:
    return finer_than(sm1, sm2, cap) and finer_than(sm2, sm1, cap)


def _family_scale(k: FormalContext, family: ClosureSystem, names: list[str]) -> ScaleMeasure:
    rows = [0] * k.n_objects
    for j, A in enumerate(family):
        for g in bits(A):
            rows[g] |= 1 << j
    scale = FormalContext(k.objects, tuple(names), tuple(rows))
    return ScaleMeasure(k, scale, ObjectMap.identity(k.n_objects))


def canonical_representation(sm: ScaleMeasure, cap: int | None = DEFAULT_CAP) -> ScaleMeasure:
    """Identity map into a scale with one attribute column per reflected extent."""
    _require_verified(sm)
    fam = sm.reflected(cap)
    names = ["{" + ",".join(sm.base.object_names(A)) + "}" for A in fam]
    return _family_scale(sm.base, fam, names)


def cnf_label(k: FormalContext, A: int) -> str:
    return "∧{" + ",".join(k.attribute_names(intent_of(k, A))) + "}"


def conjunctive_normalform(sm: ScaleMeasure, cap: int | None = DEFAULT_CAP) -> ScaleMeasure:
    """Canonical representation whose attributes are conjunctions of base attributes.

    Each reflected extent ``A`` becomes the attribute ``∧{A'}`` whose column
    is ``A''``, which equals ``A`` because the input is verified.
    """
    _require_verified(sm)
    fam = sm.reflected(cap)
    return _family_scale(sm.base, fam, [cnf_label(sm.base, A) for A in fam])


def _same_ground(cs1: ClosureSystem, cs2: ClosureSystem) -> None:
    if cs1.n != cs2.n:
        raise ValueError(f"closure systems on {cs1.n} and {cs2.n} objects")


def hierarchy_join(cs1: ClosureSystem, cs2: ClosureSystem) -> ClosureSystem:
    """Smallest closure system containing both arguments."""
    _same_ground(cs1, cs2)
    return intersection_close(set(cs1.members) | set(cs2.members), cs1.n)


def join_complement(full: ClosureSystem, part: ClosureSystem) -> ClosureSystem:
    """Least closure system whose join with ``part`` gives ``full``.

    Every meet-irreducible of ``full`` has to be present in any family
    generating ``full``, and those missing from ``part`` generate the rest.
    """
    _same_ground(full, part)
    if not part <= full:
        raise ValueError("part is not a subfamily of full")
    have = part.as_set
    return intersection_close([A for A in meet_irreducibles(full) if A not in have], full.n)


def load_scale_measure(path) -> ScaleMeasure:
    """Read ``{"base": ..cxt, "scale": ..cxt, "map": {obj: obj}}``; paths are relative to the JSON file."""
    from .io import read_cxt

    path = Path(path)
    raw = json.loads(path.read_text(encoding="utf-8"))
    base = read_cxt(path.parent / raw["base"])
    scale = read_cxt(path.parent / raw["scale"])
    return ScaleMeasure(base, scale, ObjectMap.by_name(base, scale, raw.get("map")))


def dump_scale_measure(sm: ScaleMeasure, base_path: str, scale_path: str) -> str:
    mapping = {g: sm.scale.objects[t] for g, t in zip(sm.base.objects, sm.map.image)}
    out = {"base": base_path, "scale": scale_path}
    if any(g != t for g, t in mapping.items()):
        out["map"] = mapping
    return json.dumps(out, indent=2, ensure_ascii=False)

"""Conceptual scaling error of a scaling ``(sigma, S)`` with respect to a context ``K``.

The error family collects the reflected preimages that are not extents of
``K``. Deciding that needs one closure in ``K`` per preimage, so ``Ext(K)``
itself is never enumerated; only the scale side is.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

from .bmf import frobenius_error, hamming_percent, mismatches
from .context import (FormalContext, ObjectMap, _check_map, apposition, bits, extent_of,
                      induced_subcontext, intent_of, sigma_context)
from .lattice import DEFAULT_CAP, ClosureSystem, IntractableError, _close_by_one, canonical_key
from .measure import ScaleMeasure, attribute_preimages, cnf_label

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConceptualError:
    """Error family, consistent part and inconsistent scale attributes.

    ``error_family`` and ``consistent_part`` are ``None`` when only the
    attribute error was computed (on request, or because the scale has more
    extents than the cap allows).
    """

    attribute_errors: int
    n_scale_attributes: int
    error_family: tuple[int, ...] | None = None
    consistent_part: ClosureSystem | None = None
    scale_concepts: int | None = None

    @property
    def ae(self) -> int:
        return self.attribute_errors.bit_count()

    @property
    def ce(self) -> int | None:
        return None if self.error_family is None else len(self.error_family)

    @property
    def consistent_attributes(self) -> int:
        return ((1 << self.n_scale_attributes) - 1) & ~self.attribute_errors

    def reflected(self) -> ClosureSystem | None:
        if self.error_family is None:
            return None
        return ClosureSystem(self.consistent_part.n,
                             self.consistent_part.members + self.error_family)


def _closed(k: FormalContext, A: int) -> bool:
    return extent_of(k, intent_of(k, A)) == A


def conceptual_scaling_error(k: FormalContext, s: FormalContext, sigma: ObjectMap,
                             cap: int | None = DEFAULT_CAP, ae_only: bool = False) -> ConceptualError:
    _check_map(k, s, sigma)
    bad = 0
    for m, A in enumerate(attribute_preimages(k, s, sigma)):
        if not _closed(k, A):
            bad |= 1 << m
    if ae_only:
        return ConceptualError(bad, s.n_attributes)
    try:
        scale_exts = _close_by_one(s, cap)
    except IntractableError:
        log.warning("scale has more than %s extents; reporting the attribute error only", cap)
        return ConceptualError(bad, s.n_attributes)
    fibers = sigma.fibers()
    pre = {sigma.preimage(A, fibers) for A, _ in scale_exts}
    errors, consistent = [], []
    for A in pre:
        (consistent if _closed(k, A) else errors).append(A)
    return ConceptualError(bad, s.n_attributes,
                           tuple(sorted(errors, key=canonical_key)),
                           ClosureSystem(k.n_objects, tuple(consistent)),
                           len(scale_exts))


def consistent_part_measure(k: FormalContext, s: FormalContext, sigma: ObjectMap,
                            cap: int | None = DEFAULT_CAP) -> ScaleMeasure:
    """Scale-measure of ``k`` in conjunctive normal form reflecting exactly the consistent part."""
    err = conceptual_scaling_error(k, s, sigma, cap)
    if err.consistent_part is None:
        raise IntractableError(cap, "scale extents")
    fam = err.consistent_part
    rows = [0] * k.n_objects
    names = []
    for j, A in enumerate(fam):
        names.append(cnf_label(k, A))
        for g in bits(A):
            rows[g] |= 1 << j
    scale = FormalContext(k.objects, tuple(names), tuple(rows))
    return ScaleMeasure(k, scale, ObjectMap.identity(k.n_objects))


def attribute_split(k: FormalContext, s: FormalContext, sigma: ObjectMap
                    ) -> tuple[ScaleMeasure, FormalContext]:
    """Split ``s`` into the attributes whose preimages are extents of ``k`` and the rest.

    The first part is always a scale-measure of ``k``; the second is returned
    as a plain context for inspection. Polynomial in the sizes of ``k`` and ``s``.
    """
    err = conceptual_scaling_error(k, s, sigma, ae_only=True)
    good = err.consistent_attributes
    consistent = induced_subcontext(s, s.all_objects, good)
    inconsistent = induced_subcontext(s, s.all_objects, err.attribute_errors)
    return ScaleMeasure(k, consistent, sigma), inconsistent


def apposition_measure(k: FormalContext, s: FormalContext, sigma: ObjectMap) -> FormalContext:
    """``k`` next to the scale attributes pulled back along ``sigma``.

    Both ``(sigma, s)`` and ``(id, k)`` are scale-measures of the result.
    """
    return apposition(k, sigma_context(k, s, sigma))


# -- reports -----------------------------------------------------------------


@dataclass
class ContextSummary:
    objects: int
    attributes: int
    density: float
    concepts: int | None


@dataclass
class ScalingSummary:
    attributes: int
    density: float
    concepts: int | None
    attribute_error: int
    conceptual_error: int | None
    inconsistent_attributes: list[str] = field(default_factory=list)
    frobenius: float | None = None
    hamming_pct: float | None = None
    mismatches: int | None = None


@dataclass
class ErrorReport:
    """One row of the evaluation table: the context, its approximation and the scale."""

    name: str
    context: ContextSummary
    scale: ScalingSummary | None = None
    approximation: ScalingSummary | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    HEADER = ("name", "|G|", "|M|", "D", "|B|",
              "Frob", "H%", "|B|", "AE", "CE",
              "|M|", "D", "|B|", "AE", "CE")

    def table_row(self) -> list[str]:
        def num(x, fmt="{}"):
            return "-" if x is None else fmt.format(x)

        c, a, s = self.context, self.approximation, self.scale
        row = [self.name, str(c.objects), str(c.attributes), f"{c.density:.3f}", num(c.concepts)]
        if a is None:
            row += [""] * 5
        else:
            row += [num(a.frobenius, "{:.2f}"), num(a.hamming_pct, "{:.1f}"), num(a.concepts),
                    str(a.attribute_error), num(a.conceptual_error)]
        if s is None:
            row += [""] * 5
        else:
            row += [str(s.attributes), f"{s.density:.3f}", num(s.concepts),
                    str(s.attribute_error), num(s.conceptual_error)]
        return row

    def to_table(self) -> str:
        return format_table([self])


def format_table(reports: list[ErrorReport]) -> str:
    rows = [list(ErrorReport.HEADER)] + [r.table_row() for r in reports]
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _count(ctx: FormalContext, cap: int | None) -> int | None:
    try:
        return len(_close_by_one(ctx, cap))
    except IntractableError:
        return None


def _summarize(k: FormalContext, scale: FormalContext, sigma: ObjectMap,
               cap: int | None, ae_only: bool) -> ScalingSummary:
    err = conceptual_scaling_error(k, scale, sigma, cap, ae_only)
    return ScalingSummary(
        attributes=scale.n_attributes,
        density=round(scale.density, 3),
        concepts=err.scale_concepts,
        attribute_error=err.ae,
        conceptual_error=err.ce,
        inconsistent_attributes=scale.attribute_names(err.attribute_errors),
    )


def error_report(k: FormalContext, s: FormalContext | None = None, sigma: ObjectMap | None = None,
                 k_approx: FormalContext | None = None, cap: int | None = DEFAULT_CAP,
                 ae_only: bool = False, name: str = "") -> ErrorReport:
    """Assemble the metrics of one evaluation-table row.

    ``k_approx`` is compared with ``k`` cell by cell (rows paired by
    position) and also treated as a scale of ``k`` under the identity map.
    Concept counts above ``cap``, or all of them under ``ae_only``, are
    reported as ``None``.
    """
    ctx = ContextSummary(k.n_objects, k.n_attributes, round(k.density, 3),
                         None if ae_only else _count(k, cap))
    report = ErrorReport(name or k.name, ctx)
    if s is not None:
        sigma = sigma if sigma is not None else ObjectMap.by_name(k, s)
        report.scale = _summarize(k, s, sigma, cap, ae_only)
    if k_approx is not None:
        if (k_approx.n_objects, k_approx.n_attributes) != (k.n_objects, k.n_attributes):
            raise ValueError("approximation must have the shape of the context")
        summary = _summarize(k, k_approx, ObjectMap.identity(k.n_objects), cap, ae_only)
        summary.frobenius = round(frobenius_error(k, k_approx), 2)
        summary.hamming_pct = round(hamming_percent(k, k_approx), 1)
        summary.mismatches = mismatches(k, k_approx)
        report.approximation = summary
    return report

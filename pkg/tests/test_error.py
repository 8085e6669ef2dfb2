import logging

import numpy as np
import pytest

from fcaerr import FormalContext, ObjectMap, extents, is_scale_measure, reflected_extents
from fcaerr.error import (apposition_measure, attribute_split, conceptual_scaling_error,
                          consistent_part_measure, error_report, format_table)
from fcaerr.measure import hierarchy_join

import oracles


def _ctx(I, prefix):
    return FormalContext.from_matrix([f"{prefix}{i}" for i in range(I.shape[0])],
                                     [f"{prefix}m{j}" for j in range(I.shape[1])], I)


def _random_instance(rng):
    Ik, Is = oracles.random_context(rng), oracles.random_context(rng)
    k, s = _ctx(Ik, "g"), _ctx(Is, "t")
    sigma = ObjectMap(tuple(int(x) for x in rng.integers(0, s.n_objects, k.n_objects)), s.n_objects)
    return Ik, Is, k, s, sigma


def test_eq_neq_error(eq3, neq3, id3):
    err = conceptual_scaling_error(eq3, neq3, id3)
    assert set(err.error_family) == {0b011, 0b101, 0b110}
    assert err.ce == 3 and err.ae == 3
    assert set(err.consistent_part) == {0, 0b001, 0b010, 0b100, 0b111}
    assert err.scale_concepts == 8


def test_error_family_not_closed(eq3, neq3, id3):
    fam = set(conceptual_scaling_error(eq3, neq3, id3).error_family)
    assert 0b011 & 0b101 not in fam


def test_attribute_split_eq_neq(eq3, neq3, id3):
    good, bad = attribute_split(eq3, neq3, id3)
    assert good.scale.n_attributes == 0 and bad.n_attributes == 3
    assert good.verify()
    assert set(good.reflected()) == {0b111}
    cons = conceptual_scaling_error(eq3, neq3, id3).consistent_part
    assert good.reflected() <= cons and good.reflected() != cons


def test_living_beings_is_consistent(kw, s_fig2):
    err = conceptual_scaling_error(kw, s_fig2, ObjectMap.identity(8))
    assert err.ce == 0 and err.ae == 0
    assert len(err.consistent_part) == 12


def test_consistent_part_measure(eq3, neq3, id3, kw, s_fig2):
    sm = consistent_part_measure(eq3, neq3, id3)
    assert sm.verify()
    assert set(sm.reflected()) == {0, 0b001, 0b010, 0b100, 0b111}
    assert all(name.startswith("∧{") for name in sm.scale.attributes)
    full = consistent_part_measure(kw, s_fig2, ObjectMap.identity(8))
    assert full.reflected() == reflected_extents(kw, s_fig2, ObjectMap.identity(8))


def test_apposition_measure_living_beings(kw, s_fig2):
    app = apposition_measure(kw, s_fig2, ObjectMap.identity(8))
    assert app.n_attributes == 18
    assert "W#1" in app.attributes and "W#2" in app.attributes
    assert extents(app) == extents(kw)


def test_apposition_measure_is_join():
    rng = np.random.default_rng(20)
    for _ in range(200):
        Ik, Is, k, s, sigma = _random_instance(rng)
        app = apposition_measure(k, s, sigma)
        joined = hierarchy_join(extents(k), reflected_extents(k, s, sigma))
        assert extents(app) == joined
        assert is_scale_measure(app, s, sigma)
        assert is_scale_measure(app, k, ObjectMap.identity(k.n_objects))


def test_error_properties_random():
    rng = np.random.default_rng(21)
    for _ in range(500):
        Ik, Is, k, s, sigma = _random_instance(rng)
        err = conceptual_scaling_error(k, s, sigma)
        ext_k = oracles.brute_extents(Ik)
        pre = {oracles.preimage(sigma.image, A) for A in oracles.brute_extents(Is)}
        assert set(err.error_family) == pre - ext_k
        assert set(err.consistent_part) == pre & ext_k
        assert oracles.is_closure_system(set(err.consistent_part), k.n_objects)
        assert (err.ce == 0) == (err.ae == 0) == bool(is_scale_measure(k, s, sigma))
        good, _ = attribute_split(k, s, sigma)
        assert good.verify()
        assert good.reflected() <= err.consistent_part


def test_report_self_approximation(kw):
    rep = error_report(kw, k_approx=kw, name="kw")
    a = rep.approximation
    assert a.frobenius == 0 and a.hamming_pct == 0 and a.mismatches == 0
    assert a.attribute_error == 0 and a.conceptual_error == 0
    assert rep.context.concepts == 19 and rep.context.density == 0.472


def test_report_empty_approximation(kw):
    empty = FormalContext(kw.objects, kw.attributes, (0,) * 8)
    a = error_report(kw, k_approx=empty).approximation
    assert a.attribute_error == 0
    assert a.mismatches == kw.n_incidences
    assert a.hamming_pct == round(100 * 34 / 72, 1)


def test_report_scale_row(kw, s_fig2):
    rep = error_report(kw, s_fig2, name="lb")
    assert rep.scale.attributes == 9
    assert rep.scale.concepts == 12
    assert rep.scale.attribute_error == 0 and rep.scale.conceptual_error == 0
    table = rep.to_table()
    assert table.splitlines()[0].split()[0] == "name"
    assert table.splitlines()[1].split()[:5] == ["lb", "8", "9", "0.472", "19"]
    assert format_table([rep, rep]).count("\n") == 3


def test_report_json_roundtrip(eq3, neq3, id3):
    import json
    data = json.loads(error_report(eq3, neq3, id3, name="eq").to_json())
    assert data["scale"]["conceptual_error"] == 3
    assert data["scale"]["inconsistent_attributes"] == ["1", "2", "3"]
    assert data["approximation"] is None


def test_ae_only(eq3, neq3, id3):
    err = conceptual_scaling_error(eq3, neq3, id3, ae_only=True)
    assert err.ae == 3 and err.ce is None and err.consistent_part is None
    rep = error_report(eq3, neq3, id3, ae_only=True)
    assert rep.context.concepts is None and rep.scale.conceptual_error is None
    assert "-" in rep.table_row()


def test_cap_fallback(eq3, neq3, id3, caplog):
    with caplog.at_level(logging.WARNING, logger="fcaerr.error"):
        err = conceptual_scaling_error(eq3, neq3, id3, cap=2)
    assert err.ce is None and err.ae == 3
    assert "attribute error only" in caplog.text


def test_report_shape_mismatch(kw, eq3):
    with pytest.raises(ValueError):
        error_report(kw, k_approx=eq3)

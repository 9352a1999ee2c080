import json
from fractions import Fraction

import pytest

from ckspec.exact import INF, ExactRadius, RationalComplex
from ckspec.fixtures import NAMES, load_fixture
from ckspec.model import (Anchor, Cycle, DanglingAnchor, DuplicateId,
                          MalformedWeight, MissingForwardRay, OrbitModel,
                          Ray, SchemaError, UnresolvablePoint, core_sets,
                          model_to_json, parse_model_json, rho, validate,
                          w_n)

RC = RationalComplex.of


def test_missing_forward_ray_rejected():
    raw = OrbitModel("m", (Cycle("a", (RC(1),)),), ())
    with pytest.raises(MissingForwardRay):
        validate(raw)


def test_dangling_anchor_rejected():
    raw = OrbitModel("m", (Cycle("a", (RC(1),)),),
                     (Ray("r", "forward", 1, Anchor("nope", 0)),))
    with pytest.raises(DanglingAnchor):
        validate(raw)


def test_duplicate_id_rejected():
    raw = OrbitModel("m", (Cycle("a", (RC(1),)), Cycle("a", (RC(2),))),
                     (Ray("r", "forward", 1, Anchor("a", 0)),))
    with pytest.raises(DuplicateId):
        validate(raw)


def test_phase_out_of_range_rejected():
    raw = OrbitModel("m", (Cycle("a", (RC(1),)),),
                     (Ray("r", "forward", 1, Anchor("a", 3)),))
    with pytest.raises(DanglingAnchor):
        validate(raw)


def test_two_sided_needs_alpha_and_multiplicity_one():
    raw = OrbitModel("m", (Cycle("a", (RC(1),)),),
                     (Ray("s", "two_sided", 1, Anchor("a", 0)),
                      Ray("r", "forward", 1, Anchor("a", 0))))
    with pytest.raises(DanglingAnchor):
        validate(raw)


def test_half_fixture_valid():
    m = load_fixture("half")
    assert m.heads_count() == INF
    assert m.cycle("F").gm() == ExactRadius.from_fraction(1)


def test_parse_errors():
    with pytest.raises(SchemaError):
        parse_model_json('{"name": "x", "cycles": [], "rays": [], "extra": 1}')
    with pytest.raises(SchemaError):
        parse_model_json("{not json")
    with pytest.raises(MalformedWeight):
        parse_model_json(json.dumps({
            "name": "x",
            "cycles": [{"id": "a", "weights": [[1, 0, 0, 1]]}],
            "rays": []}))


def test_unknown_key_named_in_error():
    doc = {"name": "x",
           "cycles": [{"id": "a", "wieghts": [[1, 1, 0, 1]]}],
           "rays": []}
    with pytest.raises(SchemaError, match="wieghts"):
        parse_model_json(json.dumps(doc))


def test_roundtrip_all_fixtures():
    for name in NAMES:
        m = load_fixture(name)
        text = model_to_json(m)
        m2 = parse_model_json(text)
        assert model_to_json(m2) == text


def test_core_sets_half():
    m = load_fixture("half")
    cs = core_sets(m)
    assert cs.n_cycles == ["F"]
    assert cs.m_clusters == [("F", ["B"])]
    assert cs.sources_count == INF and cs.sources is None
    assert cs.int_l_isolated == []
    assert cs.z_w == [] and cs.z_w_count == 0


def test_core_sets_ray1():
    cs = core_sets(load_fixture("ray1"))
    assert cs.sources_count == 1
    assert cs.sources == [("ray", "R", 0, 0)]
    assert cs.n_cycles == ["F"]


def test_core_sets_twocyc():
    m = load_fixture("twocyc")
    cs = core_sets(m)
    assert cs.n_cycles == ["A"]
    assert cs.m_clusters == [("A", ["R"])]
    comp = cs.l_components
    assert len(comp) == 1
    assert sorted(comp[0]["cycles"]) == ["A", "B"]
    assert comp[0]["rays"] == ["S"]
    assert cs.int_l_isolated == []


def test_core_sets_zero_flags():
    cs = core_sets(load_fixture("zero"))
    assert cs.z_w_count == 1
    assert cs.z_w[0].isolated
    cs2 = core_sets(load_fixture("bundlezero"))
    assert cs2.z_w_count == INF
    assert any(not z.isolated for z in cs2.z_w)


def test_core_sets_isolated_cycle():
    cs = core_sets(load_fixture("per3_isolated"))
    assert cs.int_l_isolated == ["P"]
    assert len(cs.l_components) == 2


def test_w_n():
    m = load_fixture("half")
    assert w_n(m, ("cycle", "F", 0), 0) == RC(1)
    assert w_n(m, ("ray", "B", 5, 2), 4) == RC(1)
    p = load_fixture("per3_isolated")
    assert w_n(p, ("cycle", "P", 0), 3) == RC(8)
    assert w_n(p, ("cycle", "P", 2), 2) == RC(4)
    with pytest.raises(UnresolvablePoint):
        w_n(m, ("cycle", "F", 1), 1)
    with pytest.raises(UnresolvablePoint):
        w_n(m, ("ray", "nope", 0, 0), 1)


def test_rho():
    m = load_fixture("half")
    assert rho(m, "M") == ExactRadius.from_fraction(1)
    p = load_fixture("per3_isolated")
    assert rho(p, ("cycle", "P")) == ExactRadius.from_fraction(2)
    assert rho(p, "L") == ExactRadius.from_fraction(2)
    assert rho(p, "M") == ExactRadius.from_fraction(1)
    tc = load_fixture("twocyc")
    assert rho(tc, "L") == ExactRadius.from_fraction(2)
    assert rho(tc, "L", inverse=True) == ExactRadius.from_fraction(Fraction(1, 2))


def test_rho_m_equals_rho_n_on_corpus():
    from _corpus import corpus
    for m in corpus(40):
        assert rho(m, "M") == rho(m, "N")


def test_zero_weight_cycle_gm():
    m = load_fixture("bundlezero")
    assert m.cycle("C").gm().is_zero


def test_phi_injective_heads_only():
    m = load_fixture("twocyc")
    assert m.phi_inv(("ray", "R", 0, 0)) is None
    assert m.phi_inv(("ray", "R", 0, 3)) == ("ray", "R", 0, 2)
    assert m.phi_inv(("ray", "S", 0, -2)) == ("ray", "S", 0, -3)
    assert m.phi(("cycle", "A", 0)) == ("cycle", "A", 0)


def test_ray_weight_lock_and_overrides():
    m = load_fixture("zero")
    r = m.rays["R"]
    assert m.ray_weight(r, 0) == RC(1)
    assert m.ray_weight(r, 1) == RC(0)   # exceptional override
    assert m.ray_weight(r, 2) == RC(1)   # locked to the cycle
    assert m.lock_bounds(r) == (0, 2)

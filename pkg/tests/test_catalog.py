"""Catalog contents, binding and serialization."""

import json

import pytest

from superint import catalog
from superint.catalog import BindingError, CatalogError, bind, custom_system, e15_with, get_system
from superint.exact import GaussC
from superint.verify import golden_table

EXPLICIT = ["E1", "E3", "E4", "E5", "E6", "E12", "E13", "E14", "E15", "E18", "S3", "S5", "S6"]
IMPLICIT = ["E2", "E7", "E8", "E9", "E10", "E11", "E16", "E17", "E19", "E20",
            "S1", "S2", "S4", "S7", "S8", "S9"]


def test_catalog_completeness():
    e = [s.id for s in catalog.systems(catalog.EUCLIDEAN_SPACE)]
    s = [s.id for s in catalog.systems(catalog.SPHERE_SPACE)]
    assert e == [f"E{k}" for k in range(1, 21)]
    assert s == [f"S{k}" for k in range(1, 10)]


def test_e3_record():
    r = get_system("E3")
    assert r.potential == "omega^2*(x^2+y^2)"
    assert r.constant_names() == ["A0", "A1", "A2", "X"]
    assert r.constant("A2").d == "omega^2*x*y"
    kinds = [rel.kind for rel in r.relations]
    assert kinds.count("bracket") == 3 and kinds.count("functional") == 1


def test_s5_record():
    r = get_system("S5")
    assert r.potential == "alpha/wbar^2"
    assert r.constant("A1").d == "-alpha*z/wbar"
    assert r.constant("A2").d == "alpha*w/wbar"
    assert r.constant("X").order == 1


def test_unknown_id_lists_valid_ids():
    with pytest.raises(CatalogError, match="E1, E2"):
        get_system("E21")


@pytest.mark.parametrize("id_", EXPLICIT)
def test_explicit_systems_print_their_scalar_parts(id_):
    r = get_system(id_)
    assert any(c.d is not None for c in r.constants if c.name != "A0")


@pytest.mark.parametrize("id_", IMPLICIT)
def test_implicit_systems_carry_leading_parts(id_):
    assert bind(id_).implicit_constants()


@pytest.mark.parametrize("id_", [s.id for s in catalog.systems()])
def test_record_invariants(id_):
    r = get_system(id_)
    assert r.constant_names()[0] == "A0"
    assert len(r.constants) >= 3
    assert len(r.expected_row) == (8 if r.space == catalog.EUCLIDEAN_SPACE else 5)


def test_defaults_are_small_and_nonzero():
    for s in catalog.systems():
        for p in s.parameters:
            assert GaussC.coerce(p.default) in (GaussC(1), GaussC(1) / 2, GaussC(1) / 4)


def test_bind_full():
    b = bind("E1", {"omega": 1, "alpha": "1/4", "beta": "1/4"})
    assert b.numeric_params == {"omega": 1, "alpha": 0.25, "beta": 0.25}


def test_bind_singular_points_to_e8():
    with pytest.raises(BindingError, match="E8"):
        bind("E7", {"c": 0}, fill_defaults=True)


def test_bind_missing_names_parameters():
    with pytest.raises(BindingError) as err:
        bind("E1", {"omega": 1})
    assert "alpha" in str(err.value) and "beta" in str(err.value)


def test_bind_unknown_parameter():
    with pytest.raises(BindingError, match="no parameter"):
        bind("E3", {"gamma": 1})


def test_bind_rejects_inexact_values():
    with pytest.raises(BindingError, match="exact"):
        bind("E3", {"omega": 0.5})


def test_export_has_29_systems_and_exact_keys():
    doc = json.loads(catalog.export_catalog())
    assert len(doc) == 29
    required = ["id", "space", "potential", "parameters", "constants", "relations", "expected_row"]
    for d in doc:
        assert list(d)[:7] == required
        for c in d["constants"]:
            assert list(c) == ["name", "order", "leading", "d"]
        for r in d["relations"]:
            assert list(r) == ["kind", "lhs", "rhs"]


def test_export_round_trip():
    text = catalog.export_catalog()
    assert catalog.load_catalog(text) == catalog.systems()
    assert catalog.export_catalog() == text


def test_e18_serialized_with_stored_constant_term():
    d = next(x for x in json.loads(catalog.export_catalog()) if x["id"] == "E18")
    fn = [r for r in d["relations"] if r["kind"] == "functional"][0]
    assert fn["lhs"].endswith("-alpha^2/4")
    assert d["errata"][0]["printed"].endswith("-alpha/4")


def test_expected_rows_equal_published_tables():
    for space in ("e2", "s2"):
        g = golden_table(space)
        for sid, row in zip(g.rows, g.matrix):
            assert get_system(sid).expected_row == row


def test_e15_hook_accepts_user_function():
    rec = e15_with("alpha*zbar^3+beta*zbar")
    b = bind(rec)
    assert b.implicit_constants() == ["A2"]
    with pytest.raises(ValueError, match="zbar"):
        e15_with("x*zbar")


def test_custom_system_free_particle():
    b = custom_system("0")
    assert b.record.parameters == ()
    assert b.explicit_constants() == ["A0"]

import json

import pytest

from prefect_hqft.documents import (
    CategoryDocument,
    DocumentError,
    category_document,
    category_from_document,
    dump_category,
    dump_groupoid,
    dump_rep,
    load_category,
    load_crossed,
    load_groupoid,
    load_rep,
    write_document,
)
from prefect_hqft.exactlin import FieldSpec
from prefect_hqft.gvcat import (
    CrossedFrobData,
    GVCategory,
    check_axioms,
    groupoid_algebra,
    groupoid_algebra_category,
)
from prefect_hqft.onedim import regular_representation, validate_rep

Z2_CATEGORY = {
    "field": {"kind": "rationals"},
    "dims": {"e": 1, "a": 1},
    "m": {"e,e": [[1]], "e,a": [[1]], "a,e": [[1]], "a,a": [[1]]},
    "j": {"x": [[1]]},
}
WITHOUT_AA = {key: rows for key, rows in Z2_CATEGORY["m"].items() if key != "a,a"}


def _write(tmp_path, data, name="category.json"):
    text = data if isinstance(data, str) else json.dumps(data)
    return write_document(tmp_path / name, text)


def test_groupoid_document_loads_back(z2_files, z2):
    groupoid_path, _ = z2_files
    loaded = load_groupoid(groupoid_path)
    assert loaded.objects == z2.objects
    assert loaded.compose("a", "a").id == "e"
    assert loaded.validate_laws().passed
    assert dump_groupoid(loaded) == dump_groupoid(z2)
    assert groupoid_path.read_text().endswith("}\n")


def test_crossed_category_document_loads_back(z2_files, z2, z2_algebra):
    groupoid_path, category_path = z2_files
    loaded = load_category(category_path, load_groupoid(groupoid_path))
    assert isinstance(loaded, CrossedFrobData)
    assert loaded.phi == z2_algebra.phi
    assert loaded.base.m == z2_algebra.base.m
    assert load_crossed(category_path, z2).phi == z2_algebra.phi


def test_minimal_category_document(tmp_path, z2):
    category = load_category(_write(tmp_path, Z2_CATEGORY), z2)
    assert isinstance(category, GVCategory)
    assert category.grading == "loops"
    assert not category.has("delta")
    assert check_axioms(category).passed
    with pytest.raises(DocumentError, match="no 'phi' block"):
        load_crossed(tmp_path / "category.json", z2)


def test_all_graded_category_keys_every_pair(tmp_path, two_object):
    category = groupoid_algebra_category(two_object)
    data = json.loads(dump_category(category))
    assert data["grading"] == "all"
    assert "a_xy,a_yx" in data["m"]
    assert "phi" not in data
    loaded = load_category(_write(tmp_path, data), two_object)
    assert loaded.m == category.m
    assert loaded.eta == category.eta


def test_fractions_and_prime_fields_survive(tmp_path, dual_numbers, z3):
    data = json.loads(dump_category(dual_numbers))
    assert data["eta"]["e"] == [["0", "1", "1", "0"]]
    assert data["phi"]["e|e"] == [["1", "0"], ["0", "1"]]
    loaded = load_category(_write(tmp_path, data), dual_numbers.groupoid)
    assert loaded.base.eta == dual_numbers.base.eta

    gf7 = FieldSpec(kind="prime-field", p=7)
    crossed = groupoid_algebra(z3, gf7)
    data = json.loads(dump_category(crossed))
    assert data["field"] == {"kind": "prime-field", "p": 7}
    assert data["m"]["a,a2"] == [[1]]
    loaded = load_category(_write(tmp_path, data, "gf7.json"), z3)
    assert loaded.field == gf7


def test_category_document_model(z2, z2_algebra):
    doc = category_document(z2_algebra)
    assert doc.phi["a|e"] == [["1"]]
    rebuilt = category_from_document(CategoryDocument.parse_obj(doc.dict()), z2)
    assert rebuilt.phi == z2_algebra.phi


def test_representation_document_loads_back(tmp_path, z3):
    rep = regular_representation(z3)
    path = write_document(tmp_path / "reps" / "regular.json", dump_rep(rep))
    loaded = load_rep(path, z3)
    assert loaded.mats == rep.mats
    assert validate_rep(loaded).passed


@pytest.mark.parametrize(
    "text, match",
    [
        ('{"dims": {"e": 1}', "is not valid JSON"),
        ('{"dims": {"e": 1, "a": 1}, "j": {"x": [[1]]}}', "is not a valid document"),
        ("[1, 2]", "is not a valid document"),
    ],
)
def test_malformed_json_is_rejected(tmp_path, z2, text, match):
    with pytest.raises(DocumentError, match=match):
        load_category(_write(tmp_path, text), z2)


@pytest.mark.parametrize(
    "change, match",
    [
        ({"m": {**Z2_CATEGORY["m"], "e,b": [[1]]}}, r"m\[e,b\] names an unknown"),
        ({"m": {**Z2_CATEGORY["m"], "e-a": [[1]]}}, "is not of the form 'a,b'"),
        ({"m": {**Z2_CATEGORY["m"], "e,a": [[1, 1]]}}, r"m\[e,a\] has shape"),
        ({"m": {**Z2_CATEGORY["m"], "e,a": [["one"]]}}, r"Entry m\[e,a\]"),
        ({"j": {"y": [[1]]}}, r"j\[y\] names an unknown object"),
        ({"dims": {"e": 1}}, "Missing dimension for 'a'"),
        ({"m": WITHOUT_AA}, "The category is malformed"),
        ({"phi": {"a|e": [[1]]}}, "The category is malformed"),
    ],
)
def test_malformed_categories_are_rejected(tmp_path, z2, change, match):
    data = {**Z2_CATEGORY, **change}
    with pytest.raises(DocumentError, match=match):
        load_category(_write(tmp_path, data), z2)


def test_malformed_groupoid_is_rejected(tmp_path):
    path = _write(tmp_path, {"objects": ["x"], "morphisms": []}, "bad.json")
    with pytest.raises(DocumentError, match="is not a valid document"):
        load_groupoid(path)
    with pytest.raises(DocumentError, match="Cannot read"):
        load_groupoid(tmp_path / "missing.json")


def test_malformed_representation_is_rejected(tmp_path, z2):
    data = {"dims": {"x": 1}, "mats": {"e": [[1]], "b": [[1]]}}
    with pytest.raises(DocumentError, match=r"mats\[b\] names an unknown"):
        load_rep(_write(tmp_path, data, "rep.json"), z2)
    data = {"dims": {"x": 1}, "mats": {"e": [[1]]}}
    with pytest.raises(DocumentError, match="The representation is malformed"):
        load_rep(_write(tmp_path, data, "rep.json"), z2)

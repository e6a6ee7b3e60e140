import pytest

from prefect_hqft.exactlin import (
    ExactMatrix,
    FieldSpec,
    ShapeMismatchError,
    identity,
    standard_coevaluation,
    standard_evaluation,
)
from prefect_hqft.groupoid import cyclic_group
from prefect_hqft.gvcat import (
    AXIOM_MODES,
    CrossedFrobData,
    DualityError,
    GVCategory,
    MissingStructureError,
    applicable_modes,
    check_axioms,
    check_crossing,
    coevaluation_from_pairing,
    derive_delta_nu,
    derive_eta_coev,
    derive_structure,
    dual_morphism,
    groupoid_algebra,
    groupoid_algebra_category,
    pairing_matrix,
    partial_trace,
    verify_duality,
    with_blocks,
)


def test_groupoid_algebras_satisfy_every_axiom(any_groupoid):
    category = groupoid_algebra_category(any_groupoid)
    assert applicable_modes(category) == list(AXIOM_MODES)
    report = check_axioms(category)
    assert report.passed, report.summary()
    assert report.name == "axioms"
    assert report.metadata == {"modes": list(AXIOM_MODES)}
    assert {check.split(".")[0] for check in report.checks()} == set(AXIOM_MODES)


def test_loops_graded_algebra_satisfies_the_crossing_laws(any_groupoid):
    crossed = groupoid_algebra(any_groupoid)
    assert check_axioms(crossed).passed
    report = check_crossing(crossed)
    assert report.passed, report.summary()
    assert "crossing.torus" in report.checks()


def test_groupoid_algebra_over_a_prime_field():
    gf3 = FieldSpec(kind="prime-field", p=3)
    crossed = groupoid_algebra(cyclic_group(3), gf3)
    assert crossed.field == gf3
    assert check_axioms(crossed).passed
    assert check_crossing(crossed).passed


def test_loops_grading_only_labels_loops(two_object):
    category = groupoid_algebra_category(two_object, grading="loops")
    assert set(category.dims) == {"e_xx", "a_xx", "e_yy", "a_yy"}
    with pytest.raises(MissingStructureError, match="is not a loop"):
        category.dim("a_xy")


def test_dual_numbers_satisfy_every_axiom(dual_numbers):
    report = check_axioms(dual_numbers)
    assert report.passed, report.summary()
    assert check_crossing(dual_numbers).passed


def test_dual_numbers_derived_pairing(dual_numbers):
    base = dual_numbers.base
    assert base.pairing("e").to_rows() == [["0", "1", "1", "0"]]
    assert base.copairing("e").to_rows() == [["0"], ["1"], ["1"], ["0"]]
    assert pairing_matrix(base, "e").to_rows() == [["0", "1"], ["1", "0"]]
    assert coevaluation_from_pairing(base, "e") == base.copairing("e")


def test_round_trip_through_the_pairings(dual_numbers):
    base = dual_numbers.base
    eta, coev = derive_eta_coev(base)
    paired = with_blocks(base, eta=eta, coev=coev, delta=None, nu=None)
    assert applicable_modes(paired) == [
        "category",
        "inner_product",
        "symmetry",
        "lemma_identities",
        "coev_unique",
    ]
    delta, nu = derive_delta_nu(paired)
    assert delta == base.delta
    assert nu == base.nu
    restored = derive_structure(paired, "delta")
    assert restored.delta == base.delta
    assert check_axioms(restored, ["round_trip", "consistency"]).passed


def test_derive_structure_keeps_the_crossing(z2_algebra):
    derived = derive_structure(z2_algebra, "eta")
    assert isinstance(derived, CrossedFrobData)
    assert derived.phi == z2_algebra.phi
    assert derived.base.eta == z2_algebra.base.eta


def test_derive_structure_errors(z2_algebra):
    with pytest.raises(ValueError, match="Unknown derivation 'sideways'"):
        derive_structure(z2_algebra, "sideways")
    bare = with_blocks(z2_algebra.base, eta=None, coev=None)
    with pytest.raises(MissingStructureError, match="needs eta and coev"):
        derive_structure(bare, "delta")


def test_planted_unit_violation_is_reported(z2):
    category = groupoid_algebra_category(z2)
    broken = with_blocks(category, j={"x": ExactMatrix.from_rows([[2]])})
    report = check_axioms(broken, ["category"])
    failing = {(entry.check, entry.instance) for entry in report.failures()}
    assert failing == {
        ("category.left_unit", ("e",)),
        ("category.left_unit", ("a",)),
        ("category.right_unit", ("e",)),
        ("category.right_unit", ("a",)),
    }
    entry = report.failures()[0]
    assert entry.lhs == ExactMatrix.from_rows([[2]])
    assert entry.rhs == identity(1)


def test_degenerate_pairing_fails_nondegeneracy(z2):
    category = groupoid_algebra_category(z2)
    zero = ExactMatrix.from_rows([[0]])
    broken = with_blocks(category, eta={**category.eta, "a": zero})
    report = check_axioms(broken, ["inner_product", "coev_unique"])
    failing = {(entry.check, entry.instance) for entry in report.failures()}
    assert ("inner_product.nondegenerate", ("a",)) in failing
    assert ("coev_unique.copairing", ("a",)) in failing


def test_requested_mode_needs_its_blocks(z2):
    category = with_blocks(groupoid_algebra_category(z2), delta=None, nu=None)
    assert "frobenius" not in applicable_modes(category)
    with pytest.raises(MissingStructureError, match="'frobenius' needs the blocks"):
        check_axioms(category, ["frobenius"])


def test_unknown_mode_is_rejected(z2_algebra):
    with pytest.raises(ValueError, match="Unknown axiom modes"):
        check_axioms(z2_algebra, ["category", "telepathy"])


def test_shapes_are_checked_on_construction(z2):
    category = groupoid_algebra_category(z2)
    wide = ExactMatrix.from_rows([[1, 1]])
    with pytest.raises(ValueError, match=r"m\[e,a\] has shape \(1, 2\)"):
        with_blocks(category, m={**category.m, ("e", "a"): wide})
    partial = {key: value for key, value in category.m.items() if key != ("a", "a")}
    with pytest.raises(ValueError, match=r"m\[a,a\] is missing"):
        with_blocks(category, m=partial)
    with pytest.raises(ValueError, match="Missing dimension for 'a'"):
        with_blocks(category, dims={"e": 1})


def test_crossed_category_must_be_loops_graded(z2):
    category = groupoid_algebra_category(z2, grading="all")
    one = ExactMatrix.from_rows([[1]])
    phi = {(a, b): one for a in ("e", "a") for b in ("e", "a")}
    with pytest.raises(ValueError, match="must be loops-graded"):
        CrossedFrobData(base=category, phi=phi)


def test_crossing_must_be_complete(z2_algebra):
    phi = dict(z2_algebra.phi)
    del phi[("a", "a")]
    with pytest.raises(ValueError, match=r"phi\[a\|a\] is missing"):
        CrossedFrobData(base=z2_algebra.base, phi=phi)


def test_sign_crossing_breaks_the_braiding(sign_crossed_s3):
    report = check_crossing(sign_crossed_s3)
    assert not report.passed
    failing = {(entry.check, entry.instance) for entry in report.failures()}
    assert ("crossing.braiding", ("p01", "p12")) in failing
    assert ("crossing.braiding", ("p01", "e")) not in failing
    assert report.counts()["crossing.braiding"]["failed"] > 0


def test_twisted_dual_numbers_satisfy_every_law(twisted_dual_numbers):
    base = twisted_dual_numbers.base
    assert base.mult("b", "a") == base.mult("a", "b").scale(-1)
    assert twisted_dual_numbers.crossing("a", "b") == identity(2).scale(-1)
    axioms = check_axioms(twisted_dual_numbers)
    assert axioms.passed, axioms.summary()
    assert {check.split(".")[0] for check in axioms.checks()} == set(AXIOM_MODES)
    crossing = check_crossing(twisted_dual_numbers)
    assert crossing.passed, crossing.summary()


def test_identity_crossing_breaks_the_twisted_braiding(untwisted_crossing):
    assert check_axioms(untwisted_crossing).passed
    report = check_crossing(untwisted_crossing)
    failing = {(entry.check, entry.instance) for entry in report.failures()}
    assert ("crossing.braiding", ("a", "b")) in failing
    assert ("crossing.braiding", ("b", "a")) in failing
    assert ("crossing.braiding", ("a", "a")) not in failing
    assert ("crossing.braiding", ("a", "e")) not in failing


def test_torus_condition_reads_only_the_maps_it_names(z2_algebra):
    phi = dict(z2_algebra.phi)
    phi[("e", "a")] = ExactMatrix.from_rows([[2]])
    report = check_crossing(CrossedFrobData(base=z2_algebra.base, phi=phi))
    failing = {(entry.check, entry.instance) for entry in report.failures()}
    assert ("crossing.unit", ("x", "a")) in failing
    assert ("crossing.torus", ("a", "a")) not in failing
    assert ("crossing.torus", ("e", "e")) not in failing
    assert ("crossing.torus", ("e", "a")) in failing


def test_partial_trace(z2_algebra):
    base = z2_algebra.base
    assert partial_trace(base, "e", "a", base.mult("e", "a")) == identity(1)
    with pytest.raises(ShapeMismatchError, match="partial_trace expects"):
        partial_trace(base, "e", "a", identity(2))


@pytest.mark.parametrize("n", [1, 3])
def test_standard_duality_is_verified(n):
    assert verify_duality(standard_evaluation(n), standard_coevaluation(n), n) == n


def test_broken_duality_is_rejected():
    ev = standard_evaluation(2).scale(2)
    with pytest.raises(DualityError, match="zig-zag"):
        verify_duality(ev, standard_coevaluation(2), 2)
    with pytest.raises(DualityError, match="do not fit"):
        verify_duality(standard_evaluation(2), standard_coevaluation(2), 3)


def test_dual_morphism_under_standard_duality_is_the_transpose():
    f = ExactMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    source = (standard_evaluation(3), standard_coevaluation(3))
    target = (standard_evaluation(2), standard_coevaluation(2))
    assert dual_morphism(f, source, target) == f.transpose()


def test_category_accessors(dual_numbers):
    base: GVCategory = dual_numbers.base
    assert base.dim("e") == 2
    assert base.unit("x").to_rows() == [["1"], ["0"]]
    assert base.counit("x").to_rows() == [["0", "1"]]
    assert dual_numbers.crossing("e", "e") == identity(2)
    with pytest.raises(MissingStructureError, match=r"No j\[y\]"):
        base.unit("y")

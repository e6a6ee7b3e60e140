import pytest

from prefect_hqft.exactlin import ExactMatrix, identity
from prefect_hqft.groupoid import cyclic_group
from prefect_hqft.onedim import (
    Circle,
    DualizableRep,
    Ev,
    Interval,
    OneCobSyntaxError,
    OneCobTypeError,
    PointIdentity,
    SignedPoint,
    character,
    check_line_moves,
    circle_invariant,
    evaluate_1d,
    format_1d,
    line_signature_text,
    one_dimensional_representation,
    parse_1d,
    permutation_representation,
    regular_representation,
    sign_representation,
    sliding_identity,
    trivial_representation,
    typecheck_1d,
    validate_rep,
    zigzag_identity,
)
from prefect_hqft.surface import Glue, Tensor


@pytest.fixture()
def scaled_swap():
    """The cyclic group of order two swapping two coordinates up to scale."""
    return DualizableRep(
        groupoid=cyclic_group(2),
        dims={"x": 2},
        mats={
            "e": identity(2),
            "a": ExactMatrix.from_rows([[0, 2], ["1/2", 0]]),
        },
    )


def test_builtin_representations_are_valid(z3, two_object):
    for rep in (
        regular_representation(z3),
        trivial_representation(two_object),
        sign_representation(),
        permutation_representation(3),
    ):
        report = validate_rep(rep)
        assert report.passed, report.summary()
        assert report.name == "representation"


def test_regular_character_counts_the_identity(z3):
    assert character(regular_representation(z3)) == {"e": 3, "a": 0, "a2": 0}


def test_permutation_character_counts_fixed_points():
    values = character(permutation_representation(3))
    assert values["e"] == 3
    assert values["p01"] == values["p12"] == 1
    assert values["p012"] == values["p021"] == 0


def test_sign_circle_is_minus_one():
    rep = sign_representation()
    assert circle_invariant(rep, "a") == -1
    assert evaluate_1d(parse_1d("circle(a)"), rep) == ExactMatrix.from_rows([[-1]])


def test_circle_is_the_trace(scaled_swap):
    assert evaluate_1d(Circle("a"), scaled_swap).scalar() == 0
    assert evaluate_1d(Circle("e"), scaled_swap).scalar() == 2


def test_negative_interval_is_the_inverse_transpose(scaled_swap):
    value = evaluate_1d(parse_1d("interval(a, -)"), scaled_swap)
    assert value.to_rows() == [["0", "1/2"], ["2", "0"]]


def test_line_moves_hold(z3, scaled_swap):
    reps = (regular_representation(z3), scaled_swap, permutation_representation(3))
    for rep in reps:
        report = check_line_moves(rep)
        assert report.passed, report.summary()
        assert report.checks() == ["line.sliding", "line.zigzag"]


def test_sliding_and_zigzag_sides(scaled_swap):
    g = scaled_swap.groupoid
    lhs, rhs = sliding_identity("a", g)
    assert typecheck_1d(lhs, g) == typecheck_1d(rhs, g)
    lhs, rhs = zigzag_identity("x")
    assert evaluate_1d(lhs, scaled_swap) == identity(2)
    assert rhs == PointIdentity((SignedPoint("+", "x"),))


def test_non_multiplicative_scalars_fail_functoriality(z2):
    rep = one_dimensional_representation(z2, {"e": 1, "a": 2})
    failing = {(entry.check, entry.instance) for entry in validate_rep(rep).failures()}
    assert ("rep.functoriality", ("a", "a")) in failing
    assert not any(check == "rep.invertibility" for check, _ in failing)


def test_singular_action_fails_invertibility(z2):
    rep = one_dimensional_representation(z2, {"e": 1, "a": 0})
    failures = validate_rep(rep).failures()
    singular = [entry for entry in failures if entry.check == "rep.invertibility"]
    assert [entry.instance for entry in singular] == [("a",)]
    assert singular[0].detail == "singular matrix"


def test_representation_shapes_are_checked(z2):
    with pytest.raises(ValueError, match=r"mats\[a\] has shape \(1, 2\)"):
        DualizableRep(
            groupoid=z2,
            dims={"x": 1},
            mats={"e": identity(1), "a": ExactMatrix.from_rows([[1, 0]])},
        )
    with pytest.raises(ValueError, match="No matrix for morphism 'a'"):
        DualizableRep(groupoid=z2, dims={"x": 1}, mats={"e": identity(1)})


def test_regular_representation_needs_one_object(two_object):
    with pytest.raises(ValueError, match="one-object groupoid"):
        regular_representation(two_object)


def test_parse_1d_builds_the_tree():
    expr = parse_1d("(interval(a, +) | id(-x)) ; ev(x)")
    assert expr == Glue(
        Tensor(Interval("a", "+"), PointIdentity((SignedPoint("-", "x"),))),
        Ev("x"),
    )


@pytest.mark.parametrize(
    "text",
    [
        "interval(a, +) | id(-x) ; ev(x)",
        "coev(x) ; swap(-x, +x) ; id(+x, -x)",
        "circle(a) | (id() ; id())",
    ],
)
def test_format_1d_parses_back(text):
    expr = parse_1d(text)
    assert parse_1d(format_1d(expr)) == expr


def test_typecheck_1d_signature(z2):
    inputs, outputs = typecheck_1d(parse_1d("(interval(a, -) | coev(x))"), z2)
    assert line_signature_text(inputs) == "[-x]"
    assert line_signature_text(outputs) == "[-x, -x, +x]"


def test_parse_1d_errors(z2):
    with pytest.raises(OneCobSyntaxError, match="column 6") as exc_info:
        parse_1d("ev(x))")
    assert exc_info.value.column == 6
    with pytest.raises(OneCobSyntaxError, match="Unknown morphism id 'zz'"):
        parse_1d("circle(zz)", z2)


def test_typecheck_1d_errors(z2, two_object):
    with pytest.raises(OneCobTypeError, match="'a_xy' is not a loop"):
        typecheck_1d(parse_1d("circle(a_xy)"), two_object)
    with pytest.raises(OneCobTypeError, match="Cannot glue") as exc_info:
        typecheck_1d(parse_1d("id(+x) ; id(-x)"), z2)
    assert exc_info.value.index == 0
    with pytest.raises(OneCobTypeError, match="not a loop"):
        circle_invariant(trivial_representation(two_object), "e_xy")


def test_circles_match_the_invariant_on_every_loop(any_groupoid):
    reps = [trivial_representation(any_groupoid)]
    if len(any_groupoid.objects) == 1:
        reps.append(regular_representation(any_groupoid))
    for rep in reps:
        for loop in any_groupoid.loops():
            expected = ExactMatrix.from_rows([[circle_invariant(rep, loop.id)]])
            assert evaluate_1d(Circle(loop.id), rep) == expected

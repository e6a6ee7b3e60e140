from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefect_hqft.evaluator import (
    MOVE_NAMES,
    check_moves,
    eval_generator,
    evaluate,
    rotation_permutations,
    rotations_to_canonical,
)
from prefect_hqft.exactlin import ExactMatrix, identity
from prefect_hqft.groupoid import cyclic_group
from prefect_hqft.gvcat import dual_morphism, groupoid_algebra
from prefect_hqft.surface import (
    SIGNS,
    Cap,
    Cylinder,
    Disc,
    Glue,
    Identity,
    SurfaceTypeError,
    Swap,
    Tensor,
    coevaluation_surface,
    dualize,
    evaluation_surface,
    format_expression,
    generators,
    glue,
    parallel,
    parse,
    sphere,
    torus,
    typecheck,
)


def test_sphere_over_a_group_algebra_is_one(z2_algebra):
    assert evaluate(sphere("x"), z2_algebra).scalar() == 1


def test_torus_over_a_group_algebra_is_one(z2_algebra):
    assert evaluate(torus("a", "a", z2_algebra.groupoid), z2_algebra).scalar() == 1


def test_dual_numbers_sphere_and_torus(dual_numbers):
    g = dual_numbers.groupoid
    assert evaluate(sphere("x"), dual_numbers).scalar() == 0
    assert evaluate(torus("e", "e", g), dual_numbers).scalar() == 2
    assert evaluate(torus("e", "e", g, "beta"), dual_numbers).scalar() == 2


def test_generators_evaluate_to_the_structure_maps(dual_numbers):
    base = dual_numbers.base
    assert evaluate(parse("B+(x)"), dual_numbers) == base.unit("x")
    assert evaluate(parse("D(-,-,+)(e,e;e,e)"), dual_numbers) == base.mult("e", "e")
    assert evaluate(parse("C(-,-)(e;e)"), dual_numbers) == base.pairing("e")
    assert evaluate(parse("C(+,+)(e;e)"), dual_numbers) == base.copairing("e")
    assert evaluate(parse("id()"), dual_numbers) == identity(1)
    assert evaluate(parse("swap(e, e)"), dual_numbers).shape == (4, 4)


def test_multiplication_then_counit(dual_numbers):
    value = evaluate(parse("D(-,-,+)(e,e;e,e) ; B-(x)"), dual_numbers)
    assert value == dual_numbers.base.pairing("e")


def test_evaluation_typechecks_first(z2_algebra):
    with pytest.raises(SurfaceTypeError, match="Cannot glue"):
        evaluate(parse("id(a) ; id(e)"), z2_algebra)


@pytest.mark.parametrize(
    "pattern, rotations", [("--+", 0), ("+--", 1), ("-+-", 2), ("+-+", 2)]
)
def test_rotations_to_canonical(pattern, rotations):
    disc = Disc(*pattern, "e", "e", "e", "e")
    assert rotations_to_canonical(disc) == rotations


def test_rotation_permutations_without_rotation_are_identities(dual_numbers):
    disc = Disc("-", "-", "+", "e", "e", "e", "e")
    rotated, p_in, p_out = rotation_permutations(disc, 0, dual_numbers)
    assert rotated == disc
    assert p_in == identity(4)
    assert p_out == identity(2)


def test_rotated_disc_matches_its_signature(dual_numbers):
    disc = parse("D(+,-,-)(e,e;e,e)")
    inputs, outputs = typecheck(disc, dual_numbers.groupoid)
    value = eval_generator(disc, dual_numbers)
    assert value.shape == (2 ** len(outputs), 2 ** len(inputs))


def test_dualize_agrees_with_the_dual_morphism(dual_numbers):
    g = dual_numbers.groupoid
    expr = parse("D(-,-,+)(e,e;e,e)")
    inputs, outputs = typecheck(expr, g)

    def duality(labels):
        return (
            evaluate(evaluation_surface(labels, g), dual_numbers),
            evaluate(coevaluation_surface(labels, g), dual_numbers),
        )

    expected = dual_morphism(
        evaluate(expr, dual_numbers), duality(inputs), duality(outputs)
    )
    assert evaluate(dualize(expr, g), dual_numbers) == expected
    assert expected.shape == (4, 2)


def test_moves_hold_over_a_group_algebra(z2_algebra):
    report = check_moves(z2_algebra)
    assert report.passed, report.summary()
    assert report.checks() == sorted(f"moves.{name}" for name in MOVE_NAMES)
    assert report.metadata == {
        "seed": 0,
        "trials": 256,
        "families": list(MOVE_NAMES),
    }


def test_moves_hold_on_every_instance_over_a_nonabelian_group_algebra(s3_algebra):
    report = check_moves(s3_algebra, trials=100000)
    assert report.passed, report.summary()
    assert report.counts()["moves.inner_switch"] == {"passed": 36, "failed": 0}


def test_moves_hold_on_every_instance_over_the_twisted_dual_numbers(
    twisted_dual_numbers,
):
    report = check_moves(twisted_dual_numbers, trials=100000)
    assert report.passed, report.summary()
    counts = report.counts()
    assert counts["moves.disc_gluing"] == {"passed": 4096, "failed": 0}
    assert counts["moves.inner_gluing"] == {"passed": 1024, "failed": 0}


def test_moves_hold_over_the_dual_numbers(dual_numbers):
    report = check_moves(dual_numbers)
    assert report.passed, report.summary()


def test_sign_crossing_fails_the_inner_switch(sign_crossed_s3):
    report = check_moves(sign_crossed_s3, families=["inner_switch"])
    assert not report.passed
    failing = {entry.instance for entry in report.failures()}
    assert ("--+", "p01", "p12") in failing
    assert ("--+", "p01", "e") not in failing
    assert ("--+", "p012", "p021") not in failing
    entry = next(e for e in report.failures() if e.instance == ("--+", "p01", "p12"))
    assert entry.lhs == ExactMatrix.from_rows([[-1]])
    assert entry.rhs == ExactMatrix.from_rows([[1]])


def test_identity_crossing_fails_the_twisted_inner_switch(untwisted_crossing):
    report = check_moves(untwisted_crossing, families=["inner_switch"])
    failing = {entry.instance for entry in report.failures()}
    assert ("--+", "a", "b") in failing
    assert ("--+", "a", "a") not in failing


def test_sampling_is_deterministic(s3_algebra):
    first = check_moves(s3_algebra, seed=11, trials=3, families=["dehn_twist"])
    second = check_moves(s3_algebra, seed=11, trials=3, families=["dehn_twist"])
    assert first.to_json() == second.to_json()
    assert first.counts() == {"moves.dehn_twist": {"passed": 12, "failed": 0}}


def test_check_moves_rejects_bad_arguments(z2_algebra):
    with pytest.raises(ValueError, match="Unknown move families"):
        check_moves(z2_algebra, families=["dehn_twist", "teleport"])
    with pytest.raises(ValueError, match="trials must be positive"):
        check_moves(z2_algebra, trials=0)


def _catalog(g):
    """Every generator over `g` with its signature."""
    loops = g.loops()
    gens = [Cap(sign, obj) for sign in SIGNS for obj in g.objects]
    gens += [
        Cylinder(eps, mu, a.id, b.id)
        for eps, mu in product(SIGNS, SIGNS)
        for a in loops
        for b in g.paths_to(a.src)
    ]
    gens += [
        Disc(*pattern, a.id, b.id, rho.id, delta.id)
        for pattern in product(SIGNS, repeat=3)
        for a, b in product(loops, loops)
        for rho in g.paths_to(a.src)
        for delta in g.paths_to(b.src)
        if rho.src == delta.src
    ]
    gens += [Identity((a.id,)) for a in loops]
    gens += [Swap(a.id, b.id) for a, b in product(loops, loops)]
    return [(gen,) + typecheck(gen, g) for gen in gens]


@st.composite
def surfaces(draw, catalog, max_generators=6):
    """Layers of generators, each consuming the previous layer's outputs."""
    producers = [item for item in catalog if not item[1]]
    layers, signature, used = [], (), 0
    for _ in range(draw(st.integers(min_value=1, max_value=3))):
        blocks, outputs, rest = [], (), signature
        while rest:
            options = [
                item for item in catalog if item[1] and rest[: len(item[1])] == item[1]
            ]
            gen, inputs, produced = draw(st.sampled_from(options))
            blocks.append(gen)
            outputs += produced
            rest = rest[len(inputs) :]
        if not blocks or draw(st.booleans()):
            gen, _, produced = draw(st.sampled_from(producers))
            blocks.append(gen)
            outputs += produced
        if used + len(blocks) > max_generators:
            break
        layers.append(parallel(*blocks))
        signature, used = outputs, used + len(blocks)
    return glue(*layers)


def _entries(matrix):
    rows, cols = matrix.shape
    return [[matrix.entry(i, j) for j in range(cols)] for i in range(rows)]


def _contract(expr, cfd):
    """Evaluates by explicit index summation over the generator matrices."""
    if isinstance(expr, Glue):
        first, second = _contract(expr.left, cfd), _contract(expr.right, cfd)
        inner, cols = len(first), len(first[0])
        return [
            [sum(row[k] * first[k][j] for k in range(inner)) for j in range(cols)]
            for row in second
        ]
    if isinstance(expr, Tensor):
        left, right = _contract(expr.left, cfd), _contract(expr.right, cfd)
        return [
            [x * y for x in left_row for y in right_row]
            for left_row in left
            for right_row in right
        ]
    return _entries(eval_generator(expr, cfd))


ORACLE_CATEGORIES = {n: groupoid_algebra(cyclic_group(n)) for n in (2, 3)}
ORACLE_CATALOGS = {n: _catalog(cfd.groupoid) for n, cfd in ORACLE_CATEGORIES.items()}


@pytest.mark.parametrize("order", sorted(ORACLE_CATEGORIES))
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_evaluate_matches_index_summation(order, data):
    cfd = ORACLE_CATEGORIES[order]
    expr = data.draw(surfaces(ORACLE_CATALOGS[order]))
    assert _entries(evaluate(expr, cfd)) == _contract(expr, cfd)


def _chains(layers, g, max_generators):
    """Every well-typed gluing of `layers` with at most `max_generators` generators."""
    typed = []
    for text in layers:
        expr = parse(text, g)
        typed.append((expr,) + typecheck(expr, g) + (len(generators(expr)),))
    chains = []

    def extend(prefix, boundary, used):
        for expr, inputs, outputs, size in typed:
            if inputs == boundary and used + size <= max_generators:
                chain = prefix + [expr]
                chains.append(glue(*chain))
                extend(chain, outputs, used + size)

    for expr, _, outputs, size in typed:
        chains.append(expr)
        extend([expr], outputs, size)
    return chains


Z2_LAYERS = [
    "B+(x)",
    "B-(x)",
    "C(-,+)(a;e)",
    "C(+,+)(a;e)",
    "C(-,-)(a;e)",
    "D(-,-,-)(a,a;e,e)",
    "D(-,-,+)(a,a;e,e)",
    "D(-,+,-)(a,a;e,e)",
    "D(-,+,+)(a,a;e,e)",
    "D(+,-,-)(a,a;e,e)",
    "D(+,-,+)(a,a;e,e)",
    "D(+,+,-)(a,a;e,e)",
    "D(+,+,+)(a,a;e,e)",
    "swap(a, e)",
    "swap(e, a)",
    "id(a) | B+(x)",
    "B-(x) | id(a)",
]

KLEIN_LAYERS = [
    "B+(x)",
    "B-(x)",
    "C(-,+)(a;b)",
    "C(+,+)(a;b)",
    "C(-,-)(a;b)",
    "D(-,-,-)(a,b;e,e)",
    "D(-,-,+)(a,b;e,e)",
    "D(-,+,-)(a,b;e,e)",
    "D(-,+,+)(a,b;e,e)",
    "D(+,-,-)(a,b;e,e)",
    "D(+,-,+)(a,b;e,e)",
    "D(+,+,-)(a,b;e,e)",
    "D(+,+,+)(a,b;e,e)",
    "swap(a, b)",
    "swap(b, a)",
    "id(a) | B+(x)",
    "B-(x) | id(b)",
]


def test_index_summation_on_every_short_chain_over_z2(z2_algebra):
    chains = _chains(Z2_LAYERS, z2_algebra.groupoid, 6)
    assert len(chains) > len(Z2_LAYERS)
    for expr in chains:
        expected = _contract(expr, z2_algebra)
        value = evaluate(expr, z2_algebra)
        assert _entries(value) == expected, format_expression(expr)


def test_index_summation_on_every_short_chain_over_the_twisted_dual_numbers(
    twisted_dual_numbers,
):
    chains = _chains(KLEIN_LAYERS, twisted_dual_numbers.groupoid, 5)
    assert len(chains) > len(KLEIN_LAYERS)
    for expr in chains:
        expected = _contract(expr, twisted_dual_numbers)
        value = evaluate(expr, twisted_dual_numbers)
        assert _entries(value) == expected, format_expression(expr)


def test_index_summation_on_the_dual_numbers(dual_numbers):
    for text in (
        "C(+,+)(e;e) ; D(-,-,+)(e,e;e,e)",
        "B+(x) | C(+,+)(e;e) ; D(-,-,+)(e,e;e,e) | id(e) ; swap(e, e)",
        "D(+,+,-)(e,e;e,e) ; D(-,-,-)(e,e;e,e)",
    ):
        expr = parse(text)
        assert _entries(evaluate(expr, dual_numbers)) == _contract(expr, dual_numbers)


DUALIZED_S3_SURFACES = [
    "id(p01)",
    "B+(x)",
    "swap(p01, p012)",
    "C(-,+)(p01;p12)",
    "C(-,-)(p01;e)",
    "C(+,+)(p012;p01)",
    "D(-,-,+)(p01,p12;e,e)",
    "D(+,+,-)(p01,e;p12,e)",
    "D(-,-,-)(p012,p01;p12,p12)",
    "C(-,+)(p01;p12) ; C(-,+)(p02;p01)",
]


@pytest.mark.parametrize("text", DUALIZED_S3_SURFACES)
def test_dualize_agrees_with_the_dual_morphism_over_s3(s3_algebra, text):
    g = s3_algebra.groupoid
    expr = parse(text, g)
    inputs, outputs = typecheck(expr, g)

    def duality(labels):
        return (
            evaluate(evaluation_surface(labels, g), s3_algebra),
            evaluate(coevaluation_surface(labels, g), s3_algebra),
        )

    value = evaluate(expr, s3_algebra)
    dual = evaluate(dualize(expr, g), s3_algebra)
    assert dual == dual_morphism(value, duality(inputs), duality(outputs))
    assert evaluate(dualize(dualize(expr, g), g), s3_algebra) == value


def test_punctured_torus_forms_agree_on_every_s3_pair(s3_algebra):
    report = check_moves(s3_algebra, families=["punctured_torus"], trials=36)
    assert report.passed, report.summary()
    assert len({entry.instance[1:] for entry in report.entries}) == 36

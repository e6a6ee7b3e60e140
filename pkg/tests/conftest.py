import pytest
from prefect.testing.utilities import prefect_test_harness

from prefect_hqft.documents import dump_category, dump_groupoid, write_document
from prefect_hqft.exactlin import ExactMatrix, identity
from prefect_hqft.groupoid import (
    codiscrete_product,
    cyclic_group,
    disjoint_union,
    from_group_table,
    symmetric_group,
    trivial_group,
)
from prefect_hqft.gvcat import (
    CrossedFrobData,
    GVCategory,
    coevaluation_from_pairing,
    derive_structure,
    groupoid_algebra,
    with_blocks,
)


@pytest.fixture(scope="session", autouse=True)
def prefect_db():
    """
    Sets up test harness for temporary DB during test runs.
    """
    with prefect_test_harness():
        yield


@pytest.fixture(autouse=True)
def reset_object_registry():
    """
    Ensures each test has a clean object registry.
    """
    from prefect.context import PrefectObjectRegistry

    with PrefectObjectRegistry():
        yield


GROUPOIDS = {
    "z2": lambda: cyclic_group(2),
    "z3": lambda: cyclic_group(3),
    "s3": lambda: symmetric_group(3),
    "two_object": lambda: codiscrete_product(cyclic_group(2), ["x", "y"]),
    "union": lambda: disjoint_union(cyclic_group(2), cyclic_group(3)),
}


@pytest.fixture(params=sorted(GROUPOIDS))
def any_groupoid(request):
    return GROUPOIDS[request.param]()


@pytest.fixture()
def z2():
    return cyclic_group(2)


@pytest.fixture()
def z3():
    return cyclic_group(3)


@pytest.fixture()
def s3():
    return symmetric_group(3)


@pytest.fixture()
def two_object():
    return codiscrete_product(cyclic_group(2), ["x", "y"])


@pytest.fixture()
def z2_algebra(z2):
    return groupoid_algebra(z2)


@pytest.fixture()
def s3_algebra(s3):
    return groupoid_algebra(s3)


@pytest.fixture()
def dual_numbers():
    """
    The algebra of dual numbers `Q[x]/(x^2)` over the trivial group with the
    counit picking the coefficient of `x`; pairings derived from `delta`
    and `nu`, trivial crossing.
    """
    group = trivial_group()
    frob = GVCategory(
        groupoid=group,
        grading="loops",
        dims={"e": 2},
        m={("e", "e"): ExactMatrix.from_rows([[1, 0, 0, 0], [0, 1, 1, 0]])},
        j={"x": ExactMatrix.from_rows([[1], [0]])},
        delta={
            ("e", "e"): ExactMatrix.from_rows([[0, 0], [1, 0], [1, 0], [0, 1]])
        },
        nu={"x": ExactMatrix.from_rows([[0, 1]])},
    )
    return CrossedFrobData(
        base=derive_structure(frob, "eta"), phi={("e", "e"): identity(2)}
    )


KLEIN = {"e": (0, 0), "a": (1, 0), "b": (0, 1), "ab": (1, 1)}


def _klein_product(g, h):
    bits = tuple((x + y) % 2 for x, y in zip(KLEIN[g], KLEIN[h]))
    return next(name for name, value in KLEIN.items() if value == bits)


def _cocycle(g, h):
    return (-1) ** (KLEIN[g][1] * KLEIN[h][0])


@pytest.fixture()
def klein():
    return from_group_table(list(KLEIN), _klein_product, "e")


@pytest.fixture()
def twisted_dual_numbers(klein):
    """
    The dual numbers tensored with the group algebra of the Klein four-group
    twisted by the cocycle `(-1)^{g2 h1}`: `m_{g,h}` is the cocycle times the
    dual-number product, and the crossing `φ^α_β` is `ω(β,α) ω(α,β)`.
    """
    product = ExactMatrix.from_rows([[1, 0, 0, 0], [0, 1, 1, 0]])
    counit = ExactMatrix.from_rows([[0, 1]])
    m = {(g, h): product.scale(_cocycle(g, h)) for g in KLEIN for h in KLEIN}
    bare = GVCategory(
        groupoid=klein,
        grading="loops",
        dims={g: 2 for g in KLEIN},
        m=m,
        j={"x": ExactMatrix.from_rows([[1], [0]])},
        eta={g: counit @ m[(g, g)] for g in KLEIN},
    )
    coev = {g: coevaluation_from_pairing(bare, g) for g in KLEIN}
    base = derive_structure(with_blocks(bare, coev=coev), "delta")
    phi = {
        (a, b): identity(2).scale(_cocycle(b, a) * _cocycle(a, b))
        for a in KLEIN
        for b in KLEIN
    }
    return CrossedFrobData(base=base, phi=phi)


@pytest.fixture()
def untwisted_crossing(twisted_dual_numbers):
    """The twisted dual numbers with every `φ^α_β` the identity."""
    return CrossedFrobData(
        base=twisted_dual_numbers.base,
        phi={key: identity(2) for key in twisted_dual_numbers.phi},
    )


@pytest.fixture()
def sign_crossed_s3(s3_algebra):
    """
    The groupoid algebra of the symmetric group on three points with the
    crossing replaced by `-1` wherever `β` does not commute with `α`.
    """
    cfd = s3_algebra
    g = cfd.groupoid
    plus, minus = ExactMatrix.from_rows([[1]]), ExactMatrix.from_rows([[-1]])
    phi = {
        (a, b): plus if g.conjugate(a, b).id == a else minus for a, b in cfd.phi
    }
    return CrossedFrobData(base=cfd.base, phi=phi)


@pytest.fixture()
def z2_files(tmp_path, z2, z2_algebra):
    groupoid_path = write_document(tmp_path / "z2.groupoid.json", dump_groupoid(z2))
    category_path = write_document(
        tmp_path / "z2.category.json", dump_category(z2_algebra)
    )
    return groupoid_path, category_path

"""
Loop Frobenius (𝒢, 𝒱)-categories and their crossed variant.

A category assigns a finite-dimensional space `L_α` to each graded morphism
`α` of a groupoid, together with structure maps stored as exact matrices:

| block   | key       | map                                   |
|---------|-----------|---------------------------------------|
| `m`     | `(α, β)`  | `L_α ⊗ L_β -> L_{αβ}`                 |
| `j`     | `x`       | `I -> L_{1x}`                         |
| `delta` | `(α, β)`  | `L_{αβ} -> L_α ⊗ L_β`                 |
| `nu`    | `x`       | `L_{1x} -> I`                         |
| `eta`   | `α`       | `L_α ⊗ L_{α⁻¹} -> I`                  |
| `coev`  | `α`       | `I -> L_{α⁻¹} ⊗ L_α`                  |
| `phi`   | `(α, β)`  | `L_α -> L_{βαβ⁻¹}` for `β: y -> x`    |

The `delta`/`nu` pair and the `eta`/`coev` pair are each optional and
determine one another; `derive_eta_coev` and `derive_delta_nu` convert.
Formulas below are written with `@` as the matrix product, so they read
right to left.
"""

from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

try:
    from typing import Literal
except ImportError:
    from typing_extensions import Literal

from prefect.logging import get_logger
from pydantic import VERSION as PYDANTIC_VERSION

if PYDANTIC_VERSION.startswith("2."):
    from pydantic.v1 import BaseModel, Field, root_validator
else:
    from pydantic import BaseModel, Field, root_validator

from prefect_hqft.exactlin import (
    RATIONALS,
    ExactMatrix,
    FieldSpec,
    ShapeMismatchError,
    SingularMatrixError,
    identity,
    symmetry,
    tensor,
)
from prefect_hqft.groupoid import Groupoid, Morphism, MorRef
from prefect_hqft.reports import Report, ReportEntry

logger = get_logger("hqft.gvcat")

PairKey = Tuple[str, str]

AXIOM_MODES = (
    "category",
    "opcategory",
    "frobenius",
    "inner_product",
    "symmetry",
    "lemma_identities",
    "coev_unique",
    "consistency",
    "round_trip",
)

_REQUIRED_BLOCKS = {
    "category": (),
    "opcategory": ("delta", "nu"),
    "frobenius": ("delta",),
    "inner_product": ("eta", "coev"),
    "symmetry": (),
    "lemma_identities": ("eta", "coev"),
    "coev_unique": ("eta", "coev"),
    "consistency": ("delta", "nu", "eta", "coev"),
    "round_trip": ("delta", "nu"),
}


class MissingStructureError(LookupError):
    """A structure map needed for the operation is absent"""


class DualityError(ValueError):
    """Evaluation and coevaluation maps fail the zig-zag identities"""


class GVCategory(BaseModel):
    """
    A loop Frobenius (𝒢, 𝒱)-category over an exact field.

    With `grading="loops"` only loops carry spaces and structure; with
    `grading="all"` every morphism does. Shapes and completeness of every
    present block are checked on construction; the axioms are checked by
    `check_axioms`.

    Examples:
        The groupoid algebra of the symmetric group on three points, checked
        against every axiom:
        ```python
        from prefect_hqft.groupoid import symmetric_group
        from prefect_hqft.gvcat import check_axioms, groupoid_algebra_category

        category = groupoid_algebra_category(symmetric_group(3))
        assert check_axioms(category).passed
        ```
    """

    groupoid: Groupoid = Field(..., description="The grading groupoid.")
    grading: Literal["all", "loops"] = Field(
        default="all", description="Which morphisms carry spaces."
    )
    field: FieldSpec = Field(default=RATIONALS, description="The scalar field.")
    dims: Dict[str, int] = Field(..., description="Dimension of each space.")
    m: Dict[PairKey, ExactMatrix] = Field(..., description="Multiplication.")
    j: Dict[str, ExactMatrix] = Field(..., description="Units.")
    delta: Optional[Dict[PairKey, ExactMatrix]] = Field(
        default=None, description="Comultiplication."
    )
    nu: Optional[Dict[str, ExactMatrix]] = Field(default=None, description="Counits.")
    eta: Optional[Dict[str, ExactMatrix]] = Field(
        default=None, description="Pairings."
    )
    coev: Optional[Dict[str, ExactMatrix]] = Field(
        default=None, description="Copairings."
    )

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _validate_shapes(cls, values):
        """
        Every present block must be complete over the grading and every
        matrix must have the shape its labels dictate.
        """
        g: Groupoid = values["groupoid"]
        field: FieldSpec = values["field"]
        dims: Dict[str, int] = values["dims"]
        graded = _graded(g, values["grading"])
        graded_ids = {ref.id for ref in graded}

        for key, n in dims.items():
            if key not in graded_ids:
                raise ValueError(f"Dimension given for '{key}', which is not graded.")
            if n < 0:
                raise ValueError(f"Dimension of '{key}' is negative.")
        for ref in graded:
            if ref.id not in dims:
                raise ValueError(f"Missing dimension for '{ref.id}'.")

        def dim(ref: MorRef) -> int:
            return dims[ref.id]

        pairs = _pairs(graded)
        pair_shapes = {
            (a.id, b.id): (dim(g.compose(a, b)), dim(a) * dim(b)) for a, b in pairs
        }
        unit_shapes = {x: (dim(g.identity(x)), 1) for x in g.objects}
        inverse_dims = {ref.id: dim(g.inverse(ref)) for ref in graded}

        _check_block("m", values["m"], pair_shapes, field)
        _check_block("j", values["j"], unit_shapes, field)
        if values.get("delta") is not None:
            flipped = {key: (c, r) for key, (r, c) in pair_shapes.items()}
            _check_block("delta", values["delta"], flipped, field)
        if values.get("nu") is not None:
            co_units = {x: (1, r) for x, (r, _) in unit_shapes.items()}
            _check_block("nu", values["nu"], co_units, field)
        if values.get("eta") is not None:
            for ref in graded:
                if dim(ref) != inverse_dims[ref.id]:
                    raise ValueError(
                        f"A pairing needs dim L_{ref.id} = dim L_{ref.id}⁻¹, "
                        f"got {dim(ref)} and {inverse_dims[ref.id]}."
                    )
            shapes = {r.id: (1, dim(r) * inverse_dims[r.id]) for r in graded}
            _check_block("eta", values["eta"], shapes, field)
        if values.get("coev") is not None:
            shapes = {r.id: (inverse_dims[r.id] * dim(r), 1) for r in graded}
            _check_block("coev", values["coev"], shapes, field)
        return values

    def graded(self) -> List[MorRef]:
        """Morphisms carrying a space, in declaration order."""
        return _graded(self.groupoid, self.grading)

    def composable_pairs(self) -> List[Tuple[MorRef, MorRef]]:
        """Graded pairs the multiplication is defined on."""
        return _pairs(self.graded())

    def composable_triples(self) -> List[Tuple[MorRef, MorRef, MorRef]]:
        """Graded triples `(α, β, γ)` with consecutive endpoints matching."""
        graded = self.graded()
        return [
            (a, b, c)
            for a, b in _pairs(graded)
            for c in graded
            if b.tgt == c.src
        ]

    def has(self, *blocks: str) -> bool:
        """Whether every named optional block is present."""
        return all(getattr(self, block) is not None for block in blocks)

    def _label(self, morphism: Morphism) -> MorRef:
        ref = self.groupoid.morphism(morphism)
        if self.grading == "loops" and not ref.is_loop:
            raise MissingStructureError(
                f"'{ref.id}' is not a loop and carries no space in a "
                "loops-graded category."
            )
        return ref

    def _block(self, block: str, key, label: str) -> ExactMatrix:
        table = getattr(self, block)
        if table is None:
            raise MissingStructureError(f"The category has no '{block}' block.")
        try:
            return table[key]
        except KeyError:
            message = f"No {block}[{label}] in the category."
            raise MissingStructureError(message) from None

    def dim(self, morphism: Morphism) -> int:
        """Dimension of `L_α`."""
        return self.dims[self._label(morphism).id]

    def ident(self, morphism: Morphism) -> ExactMatrix:
        """The identity of `L_α`."""
        return identity(self.dim(morphism), self.field)

    def mult(self, first: Morphism, second: Morphism) -> ExactMatrix:
        """`m_{α,β}: L_α ⊗ L_β -> L_{αβ}`."""
        a, b = self._label(first), self._label(second)
        return self._block("m", (a.id, b.id), f"{a.id},{b.id}")

    def unit(self, obj: str) -> ExactMatrix:
        """`j_x: I -> L_{1x}`."""
        return self._block("j", obj, obj)

    def comult(self, first: Morphism, second: Morphism) -> ExactMatrix:
        """`Δ_{α,β}: L_{αβ} -> L_α ⊗ L_β`."""
        a, b = self._label(first), self._label(second)
        return self._block("delta", (a.id, b.id), f"{a.id},{b.id}")

    def counit(self, obj: str) -> ExactMatrix:
        """`ν_x: L_{1x} -> I`."""
        return self._block("nu", obj, obj)

    def pairing(self, morphism: Morphism) -> ExactMatrix:
        """`η_α: L_α ⊗ L_{α⁻¹} -> I`."""
        a = self._label(morphism)
        return self._block("eta", a.id, a.id)

    def copairing(self, morphism: Morphism) -> ExactMatrix:
        """`coev_α: I -> L_{α⁻¹} ⊗ L_α`."""
        a = self._label(morphism)
        return self._block("coev", a.id, a.id)


class CrossedFrobData(BaseModel):
    """
    A loops-graded category with every structure block, plus the crossing
    `φ^α_β: L_α -> L_{βαβ⁻¹}` for every loop `α` at `x` and `β: y -> x`.
    """

    base: GVCategory = Field(..., description="The underlying category.")
    phi: Dict[PairKey, ExactMatrix] = Field(..., description="The crossing.")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _validate_crossing(cls, values):
        """
        The base must be loops-graded with all blocks; the crossing must be
        complete with shapes `dim L_{βαβ⁻¹} x dim L_α`.
        """
        base: GVCategory = values["base"]
        if base.grading != "loops":
            raise ValueError("A crossed category must be loops-graded.")
        missing = [
            b for b in ("delta", "nu", "eta", "coev") if getattr(base, b) is None
        ]
        if missing:
            raise ValueError(f"A crossed category needs the blocks {missing}.")
        g = base.groupoid
        shapes = {
            (a.id, b.id): (base.dim(g.conjugate(a, b)), base.dim(a))
            for a, b in _crossing_pairs(g)
        }
        _check_block("phi", values["phi"], shapes, base.field, separator="|")
        return values

    @property
    def groupoid(self) -> Groupoid:
        """The grading groupoid."""
        return self.base.groupoid

    @property
    def field(self) -> FieldSpec:
        """The scalar field."""
        return self.base.field

    def crossing(self, loop: Morphism, path: Morphism) -> ExactMatrix:
        """`φ^α_β`."""
        a = self.groupoid.morphism(loop)
        b = self.groupoid.morphism(path)
        try:
            return self.phi[(a.id, b.id)]
        except KeyError:
            message = f"No phi[{a.id}|{b.id}] in the category."
            raise MissingStructureError(message) from None


CategoryLike = Union[GVCategory, CrossedFrobData]


def _category(cat: CategoryLike) -> GVCategory:
    return cat.base if isinstance(cat, CrossedFrobData) else cat


def _graded(g: Groupoid, grading: str) -> List[MorRef]:
    return g.loops() if grading == "loops" else g.refs()


def _pairs(graded: Sequence[MorRef]) -> List[Tuple[MorRef, MorRef]]:
    return [(a, b) for a, b in product(graded, graded) if a.tgt == b.src]


def _crossing_pairs(g: Groupoid) -> List[Tuple[MorRef, MorRef]]:
    return [(a, b) for a in g.loops() for b in g.paths_to(a.src)]


def _check_block(
    name: str,
    block: Dict,
    shapes: Dict,
    field: FieldSpec,
    separator: str = ",",
) -> None:
    for key in block:
        if key not in shapes:
            raise ValueError(f"{name}[{_format_key(key, separator)}] is not expected.")
    for key, expected in shapes.items():
        if key not in block:
            raise ValueError(f"{name}[{_format_key(key, separator)}] is missing.")
        matrix = block[key]
        if matrix.field != field:
            raise ValueError(
                f"{name}[{_format_key(key, separator)}] is over the "
                f"{matrix.field.describe()}, expected the {field.describe()}."
            )
        if matrix.shape != expected:
            raise ValueError(
                f"Structure map {name}[{_format_key(key, separator)}] has shape "
                f"{matrix.shape}, expected {expected}."
            )


def _format_key(key, separator: str) -> str:
    return separator.join(key) if isinstance(key, tuple) else str(key)


def groupoid_algebra_category(
    groupoid: Groupoid, field: FieldSpec = RATIONALS, grading: str = "all"
) -> GVCategory:
    """
    The groupoid algebra: every graded space is one-dimensional and every
    structure map, both pairs of optional blocks included, is `[1]`.

    Raises:
        InvalidGroupoidError: If the groupoid violates a law.
    """
    groupoid.require_valid()
    graded = _graded(groupoid, grading)
    one = ExactMatrix.from_rows([[1]], field)
    pairs = {(a.id, b.id): one for a, b in _pairs(graded)}
    units = {x: one for x in groupoid.objects}
    singles = {ref.id: one for ref in graded}
    return GVCategory(
        groupoid=groupoid,
        grading=grading,
        field=field,
        dims={ref.id: 1 for ref in graded},
        m=pairs,
        j=units,
        delta=dict(pairs),
        nu=dict(units),
        eta=singles,
        coev=dict(singles),
    )


def groupoid_algebra(
    groupoid: Groupoid, field: FieldSpec = RATIONALS
) -> CrossedFrobData:
    """
    The loops-graded groupoid algebra with the conjugation crossing
    `φ^α_β = [1]`.
    """
    base = groupoid_algebra_category(groupoid, field, grading="loops")
    one = ExactMatrix.from_rows([[1]], field)
    phi = {(a.id, b.id): one for a, b in _crossing_pairs(groupoid)}
    return CrossedFrobData(base=base, phi=phi)


def with_blocks(cat: GVCategory, **blocks) -> GVCategory:
    """A validated copy of `cat` with some blocks replaced."""
    values = {name: getattr(cat, name) for name in cat.__fields__}
    values.update(blocks)
    return GVCategory(**values)


def pairing_matrix(cat: CategoryLike, morphism: Morphism) -> ExactMatrix:
    """
    `η_α` as a bilinear form: the `dim L_α x dim L_{α⁻¹}` matrix `P` with
    `P[i][j] = η_α(e_i ⊗ f_j)`.
    """
    cat = _category(cat)
    a = cat.groupoid.morphism(morphism)
    rows, cols = cat.dim(a), cat.dim(cat.groupoid.inverse(a))
    (flat,) = cat.pairing(a).elements()
    return ExactMatrix._from_elements(
        [flat[i * cols : (i + 1) * cols] for i in range(rows)], (rows, cols), cat.field
    )


def coevaluation_from_pairing(cat: CategoryLike, morphism: Morphism) -> ExactMatrix:
    """
    The unique `coev_α` satisfying the zig-zag identities with `η_α`: the
    entries of the inverse of the pairing matrix, flattened row-major.

    Raises:
        SingularMatrixError: If the pairing is degenerate.
    """
    cat = _category(cat)
    inverse = pairing_matrix(cat, morphism).inverse()
    flat = [x for row in inverse.elements() for x in row]
    return ExactMatrix._from_elements([[x] for x in flat], (len(flat), 1), cat.field)


def check_axioms(cat: CategoryLike, modes: Optional[Iterable[str]] = None) -> Report:
    """
    Checks the axioms of the requested modes on every instance.

    Args:
        cat: The category; a crossed category is checked through its base.
        modes: Names from `AXIOM_MODES`. `None` selects every mode whose
            blocks are present.

    Returns:
        A report with check ids `{mode}.{identity}`.

    Raises:
        ValueError: For an unknown mode.
        MissingStructureError: If a requested mode needs an absent block.
    """
    cat = _category(cat)
    if modes is None:
        modes = applicable_modes(cat)
    modes = list(modes)
    unknown = sorted(set(modes) - set(AXIOM_MODES))
    if unknown:
        raise ValueError(f"Unknown axiom modes {unknown}; known: {list(AXIOM_MODES)}.")
    entries: List[ReportEntry] = []
    for mode in modes:
        missing = [b for b in _REQUIRED_BLOCKS[mode] if getattr(cat, b) is None]
        if mode == "symmetry" and not cat.has("eta") and not cat.has("nu"):
            missing = ["eta or nu"]
        if missing:
            raise MissingStructureError(
                f"Axiom mode '{mode}' needs the blocks {missing}."
            )
        entries.extend(_MODE_CHECKS[mode](cat))
    report = Report(name="axioms", entries=entries, metadata={"modes": modes})
    logger.info(
        "Checked %d axiom instances over modes %s; %d failed.",
        len(report.entries),
        ", ".join(modes),
        len(report.failures()),
    )
    return report


def applicable_modes(cat: CategoryLike) -> List[str]:
    """Modes whose required blocks are all present."""
    cat = _category(cat)
    modes = [
        mode
        for mode in AXIOM_MODES
        if all(getattr(cat, block) is not None for block in _REQUIRED_BLOCKS[mode])
    ]
    if not cat.has("eta") and not cat.has("nu"):
        modes.remove("symmetry")
    return modes


def _check_category(cat: GVCategory) -> List[ReportEntry]:
    g, entries = cat.groupoid, []
    for a, b, c in cat.composable_triples():
        ab, bc = g.compose(a, b), g.compose(b, c)
        entries.append(
            ReportEntry.compare(
                "category.associativity",
                (a.id, b.id, c.id),
                cat.mult(ab, c) @ tensor(cat.mult(a, b), cat.ident(c)),
                cat.mult(a, bc) @ tensor(cat.ident(a), cat.mult(b, c)),
            )
        )
    for a in cat.graded():
        one_x, one_y = g.identity(a.src), g.identity(a.tgt)
        entries.append(
            ReportEntry.compare(
                "category.left_unit",
                (a.id,),
                cat.mult(one_x, a) @ tensor(cat.unit(a.src), cat.ident(a)),
                cat.ident(a),
            )
        )
        entries.append(
            ReportEntry.compare(
                "category.right_unit",
                (a.id,),
                cat.mult(a, one_y) @ tensor(cat.ident(a), cat.unit(a.tgt)),
                cat.ident(a),
            )
        )
    return entries


def _check_opcategory(cat: GVCategory) -> List[ReportEntry]:
    g, entries = cat.groupoid, []
    for a, b, c in cat.composable_triples():
        ab, bc = g.compose(a, b), g.compose(b, c)
        entries.append(
            ReportEntry.compare(
                "opcategory.coassociativity",
                (a.id, b.id, c.id),
                tensor(cat.comult(a, b), cat.ident(c)) @ cat.comult(ab, c),
                tensor(cat.ident(a), cat.comult(b, c)) @ cat.comult(a, bc),
            )
        )
    for a in cat.graded():
        one_x, one_y = g.identity(a.src), g.identity(a.tgt)
        entries.append(
            ReportEntry.compare(
                "opcategory.left_counit",
                (a.id,),
                tensor(cat.counit(a.src), cat.ident(a)) @ cat.comult(one_x, a),
                cat.ident(a),
            )
        )
        entries.append(
            ReportEntry.compare(
                "opcategory.right_counit",
                (a.id,),
                tensor(cat.ident(a), cat.counit(a.tgt)) @ cat.comult(a, one_y),
                cat.ident(a),
            )
        )
    return entries


def _check_frobenius(cat: GVCategory) -> List[ReportEntry]:
    g, entries = cat.groupoid, []
    for a, b, c in cat.composable_triples():
        ab, bc = g.compose(a, b), g.compose(b, c)
        instance = (a.id, b.id, c.id)
        entries.append(
            ReportEntry.compare(
                "frobenius.left",
                instance,
                cat.comult(a, bc) @ cat.mult(ab, c),
                tensor(cat.ident(a), cat.mult(b, c))
                @ tensor(cat.comult(a, b), cat.ident(c)),
            )
        )
        entries.append(
            ReportEntry.compare(
                "frobenius.right",
                instance,
                cat.comult(ab, c) @ cat.mult(a, bc),
                tensor(cat.mult(a, b), cat.ident(c))
                @ tensor(cat.ident(a), cat.comult(b, c)),
            )
        )
    return entries


def _check_inner_product(cat: GVCategory) -> List[ReportEntry]:
    g, entries = cat.groupoid, []
    for a in cat.graded():
        ai = g.inverse(a)
        entries.append(
            ReportEntry.compare(
                "inner_product.zigzag_left",
                (a.id,),
                tensor(cat.pairing(a), cat.ident(a))
                @ tensor(cat.ident(a), cat.copairing(a)),
                cat.ident(a),
            )
        )
        entries.append(
            ReportEntry.compare(
                "inner_product.zigzag_right",
                (a.id,),
                tensor(cat.ident(ai), cat.pairing(a))
                @ tensor(cat.copairing(a), cat.ident(ai)),
                cat.ident(ai),
            )
        )
        entries.append(
            ReportEntry.verdict(
                "inner_product.nondegenerate",
                (a.id,),
                pairing_matrix(cat, a).is_invertible(),
                f"The pairing of L_{a.id} with L_{ai.id} is degenerate.",
            )
        )
    for a, b in cat.composable_pairs():
        ab = g.compose(a, b)
        c = g.inverse(ab)
        entries.append(
            ReportEntry.compare(
                "inner_product.invariance",
                (a.id, b.id),
                cat.pairing(ab) @ tensor(cat.mult(a, b), cat.ident(c)),
                cat.pairing(a) @ tensor(cat.ident(a), cat.mult(b, c)),
            )
        )
    return entries


def _check_symmetry(cat: GVCategory) -> List[ReportEntry]:
    g, entries = cat.groupoid, []
    for a in cat.graded():
        ai = g.inverse(a)
        swap = symmetry(cat.dim(a), cat.dim(ai), cat.field)
        if cat.has("eta"):
            entries.append(
                ReportEntry.compare(
                    "symmetry.pairing",
                    (a.id,),
                    cat.pairing(a),
                    cat.pairing(ai) @ swap,
                )
            )
        if cat.has("nu"):
            entries.append(
                ReportEntry.compare(
                    "symmetry.counit",
                    (a.id,),
                    cat.counit(a.src) @ cat.mult(a, ai),
                    cat.counit(a.tgt) @ cat.mult(ai, a) @ swap,
                )
            )
    return entries


def _check_lemma_identities(cat: GVCategory) -> List[ReportEntry]:
    g, ident, entries = cat.groupoid, cat.ident, []
    for a, b in cat.composable_pairs():
        mu = g.compose(a, b)
        mubar = g.inverse(mu)
        m_ab = cat.mult(a, b)
        sides = {
            "copairing_left": tensor(ident(mu), cat.pairing(mubar))
            @ tensor(ident(mu), ident(mubar), m_ab)
            @ tensor(cat.copairing(mubar), ident(a), ident(b)),
            "copairing_middle": tensor(ident(mu), cat.pairing(g.inverse(b)))
            @ tensor(ident(mu), cat.mult(mubar, a), ident(b))
            @ tensor(cat.copairing(mubar), ident(a), ident(b)),
            "pairing_left": tensor(cat.pairing(mu), ident(mu))
            @ tensor(m_ab, ident(mubar), ident(mu))
            @ tensor(ident(a), ident(b), cat.copairing(mu)),
            "pairing_middle": tensor(cat.pairing(a), ident(mu))
            @ tensor(ident(a), cat.mult(b, mubar), ident(mu))
            @ tensor(ident(a), ident(b), cat.copairing(mu)),
        }
        for name, lhs in sides.items():
            entries.append(
                ReportEntry.compare(
                    f"lemma_identities.{name}", (a.id, b.id), lhs, m_ab
                )
            )
    return entries


def _check_coev_unique(cat: GVCategory) -> List[ReportEntry]:
    entries = []
    for a in cat.graded():
        try:
            expected = coevaluation_from_pairing(cat, a)
        except (SingularMatrixError, ShapeMismatchError):
            entries.append(
                ReportEntry.verdict(
                    "coev_unique.copairing",
                    (a.id,),
                    False,
                    f"The pairing of L_{a.id} is degenerate, so no copairing fits.",
                )
            )
            continue
        entries.append(
            ReportEntry.compare(
                "coev_unique.copairing", (a.id,), cat.copairing(a), expected
            )
        )
    return entries


def _check_consistency(cat: GVCategory) -> List[ReportEntry]:
    g, entries = cat.groupoid, []
    eta, coev = derive_eta_coev(cat)
    delta, nu = derive_delta_nu(cat)
    for a in cat.graded():
        entries.append(
            ReportEntry.compare("consistency.eta", (a.id,), cat.pairing(a), eta[a.id])
        )
        entries.append(
            ReportEntry.compare(
                "consistency.coev", (a.id,), cat.copairing(a), coev[a.id]
            )
        )
    for x in g.objects:
        entries.append(
            ReportEntry.compare("consistency.nu", (x,), cat.counit(x), nu[x])
        )
    for a, b in cat.composable_pairs():
        key = (a.id, b.id)
        entries.append(
            ReportEntry.compare("consistency.delta", key, cat.comult(a, b), delta[key])
        )
        entries.append(
            ReportEntry.compare(
                "consistency.delta_alternative",
                key,
                delta[key],
                _alternative_comult(cat, a, b),
            )
        )
    return entries


def _check_round_trip(cat: GVCategory) -> List[ReportEntry]:
    eta, coev = derive_eta_coev(cat)
    paired = with_blocks(cat, eta=eta, coev=coev, delta=None, nu=None)
    delta, nu = derive_delta_nu(paired)
    entries = [
        ReportEntry.compare("round_trip.delta", key, cat.delta[key], delta[key])
        for key in cat.delta
    ]
    entries.extend(
        ReportEntry.compare("round_trip.nu", (x,), cat.nu[x], nu[x]) for x in cat.nu
    )
    return entries


_MODE_CHECKS = {
    "category": _check_category,
    "opcategory": _check_opcategory,
    "frobenius": _check_frobenius,
    "inner_product": _check_inner_product,
    "symmetry": _check_symmetry,
    "lemma_identities": _check_lemma_identities,
    "coev_unique": _check_coev_unique,
    "consistency": _check_consistency,
    "round_trip": _check_round_trip,
}


def derive_eta_coev(
    cat: CategoryLike,
) -> Tuple[Dict[str, ExactMatrix], Dict[str, ExactMatrix]]:
    """
    Pairings and copairings from the comultiplicative structure:
    `η_α = ν_x m_{α,α⁻¹}` and `coev_α = Δ_{α⁻¹,α} j_y` for `α: x -> y`.

    Raises:
        MissingStructureError: If `delta` or `nu` is absent.
    """
    cat = _category(cat)
    if not cat.has("delta", "nu"):
        raise MissingStructureError("Deriving eta and coev needs delta and nu.")
    g = cat.groupoid
    eta, coev = {}, {}
    for a in cat.graded():
        ai = g.inverse(a)
        eta[a.id] = cat.counit(a.src) @ cat.mult(a, ai)
        coev[a.id] = cat.comult(ai, a) @ cat.unit(a.tgt)
    return eta, coev


def derive_delta_nu(
    cat: CategoryLike,
) -> Tuple[Dict[PairKey, ExactMatrix], Dict[str, ExactMatrix]]:
    """
    Comultiplication and counits from the pairings:
    `Δ_{α,β} = (I_α ⊗ m_{α⁻¹,αβ}) (coev_{α⁻¹} ⊗ I_{αβ})` and
    `ν_x = η_{1x} (j_x ⊗ I_{1x})`.

    Raises:
        MissingStructureError: If `eta` or `coev` is absent.
    """
    cat = _category(cat)
    if not cat.has("eta", "coev"):
        raise MissingStructureError("Deriving delta and nu needs eta and coev.")
    g = cat.groupoid
    delta = {}
    for a, b in cat.composable_pairs():
        ai, ab = g.inverse(a), g.compose(a, b)
        delta[(a.id, b.id)] = tensor(cat.ident(a), cat.mult(ai, ab)) @ tensor(
            cat.copairing(ai), cat.ident(ab)
        )
    nu = {}
    for x in g.objects:
        one = g.identity(x)
        nu[x] = cat.pairing(one) @ tensor(cat.unit(x), cat.ident(one))
    return delta, nu


DERIVATIONS = ("eta", "delta")


def derive_structure(cat: CategoryLike, direction: str) -> CategoryLike:
    """
    Adds the blocks one Frobenius presentation determines from the other.

    Args:
        cat: The category, crossed or not.
        direction: `"eta"` derives pairings and copairings from `delta` and
            `nu`; `"delta"` derives `delta` and `nu` from the pairings.

    Returns:
        A category of the same kind with the derived blocks replacing any
        stored ones.

    Raises:
        ValueError: For an unknown direction.
        MissingStructureError: If the source blocks are absent.
    """
    if direction not in DERIVATIONS:
        raise ValueError(f"Unknown derivation '{direction}'; known: {DERIVATIONS}.")
    base = _category(cat)
    if direction == "eta":
        eta, coev = derive_eta_coev(base)
        derived = with_blocks(base, eta=eta, coev=coev)
    else:
        delta, nu = derive_delta_nu(base)
        derived = with_blocks(base, delta=delta, nu=nu)
    logger.info(
        "Derived the %s blocks of a %s-graded category.", direction, base.grading
    )
    if isinstance(cat, CrossedFrobData):
        return CrossedFrobData(base=derived, phi=cat.phi)
    return derived


def _alternative_comult(cat: GVCategory, a: MorRef, b: MorRef) -> ExactMatrix:
    g = cat.groupoid
    ab, bi = g.compose(a, b), g.inverse(b)
    return tensor(cat.mult(ab, bi), cat.ident(b)) @ tensor(
        cat.ident(ab), cat.copairing(b)
    )


def partial_trace(
    cat: CategoryLike, alpha: Morphism, beta: Morphism, f: ExactMatrix
) -> ExactMatrix:
    """
    Traces out `L_β` from `f: L_α ⊗ L_β -> L_β`:
    `η_β (f ⊗ I_{β⁻¹}) (I_α ⊗ coev_{β⁻¹})`, a map `L_α -> I`.

    Raises:
        ShapeMismatchError: If `f` does not have the shape its labels dictate.
    """
    cat = _category(cat)
    g = cat.groupoid
    b = g.morphism(beta)
    bi = g.inverse(b)
    expected = (cat.dim(b), cat.dim(alpha) * cat.dim(b))
    if f.shape != expected:
        raise ShapeMismatchError(
            f"partial_trace expects a {expected} matrix, got {f.shape}."
        )
    return (
        cat.pairing(b)
        @ tensor(f, cat.ident(bi))
        @ tensor(cat.ident(alpha), cat.copairing(bi))
    )


def verify_duality(
    evaluation: ExactMatrix, coevaluation: ExactMatrix, dim: int
) -> int:
    """
    Checks the zig-zag identities of a duality `ev: A ⊗ A* -> I`,
    `coev: I -> A* ⊗ A` with `dim A = dim` and returns `dim A*`.

    Raises:
        DualityError: If a shape is wrong or a zig-zag fails.
    """
    if dim == 0:
        dual = 0 if evaluation.cols == 0 else -1
    else:
        dual, remainder = divmod(evaluation.cols, dim)
        dual = dual if remainder == 0 else -1
    if (
        dual < 0
        or evaluation.rows != 1
        or coevaluation.shape != (dual * dim, 1)
    ):
        raise DualityError(
            f"ev {evaluation.shape} and coev {coevaluation.shape} do not fit a "
            f"{dim}-dimensional space."
        )
    field = evaluation.field
    a, a_dual = identity(dim, field), identity(dual, field)
    if tensor(evaluation, a) @ tensor(a, coevaluation) != a:
        raise DualityError("The zig-zag (ev ⊗ A)(A ⊗ coev) is not the identity.")
    if tensor(a_dual, evaluation) @ tensor(coevaluation, a_dual) != a_dual:
        raise DualityError("The zig-zag (A* ⊗ ev)(coev ⊗ A*) is not the identity.")
    return dual


def dual_morphism(
    f: ExactMatrix,
    duality_source: Tuple[ExactMatrix, ExactMatrix],
    duality_target: Tuple[ExactMatrix, ExactMatrix],
) -> ExactMatrix:
    """
    The dual `f*: B* -> A*` of `f: A -> B`,
    `(A* ⊗ ev_B) (A* ⊗ f ⊗ B*) (coev_A ⊗ B*)`.

    Args:
        f: The map to dualize.
        duality_source: `(ev_A, coev_A)`.
        duality_target: `(ev_B, coev_B)`.

    Raises:
        DualityError: If either duality fails its zig-zag identities.
    """
    ev_a, coev_a = duality_source
    ev_b, coev_b = duality_target
    dim_a_dual = verify_duality(ev_a, coev_a, f.cols)
    dim_b_dual = verify_duality(ev_b, coev_b, f.rows)
    a_dual = identity(dim_a_dual, f.field)
    b_dual = identity(dim_b_dual, f.field)
    return (
        tensor(a_dual, ev_b)
        @ tensor(a_dual, f, b_dual)
        @ tensor(coev_a, b_dual)
    )


def check_crossing(cfd: CrossedFrobData) -> Report:
    """
    Checks the crossing laws: compatibility with the Frobenius structure,
    functoriality in the path, the braiding and twist conditions, the torus
    trace condition and their standard consequences.
    """
    cat, g = cfd.base, cfd.groupoid
    phi, ident = cfd.crossing, cat.ident
    entries: List[ReportEntry] = []
    for x in g.objects:
        loops, paths = g.loops_at(x), g.paths_to(x)
        one_x = g.identity(x)
        for b in paths:
            y = b.src
            entries.append(
                ReportEntry.compare(
                    "crossing.unit",
                    (x, b.id),
                    phi(one_x, b) @ cat.unit(x),
                    cat.unit(y),
                )
            )
            entries.append(
                ReportEntry.compare(
                    "crossing.counit",
                    (x, b.id),
                    cat.counit(y) @ phi(one_x, b),
                    cat.counit(x),
                )
            )
            for a, a2 in product(loops, loops):
                ca, ca2, aa2 = g.conjugate(a, b), g.conjugate(a2, b), g.compose(a, a2)
                instance = (a.id, a2.id, b.id)
                entries.append(
                    ReportEntry.compare(
                        "crossing.multiplication",
                        instance,
                        phi(aa2, b) @ cat.mult(a, a2),
                        cat.mult(ca, ca2) @ tensor(phi(a, b), phi(a2, b)),
                    )
                )
                entries.append(
                    ReportEntry.compare(
                        "crossing.comultiplication",
                        instance,
                        tensor(phi(a, b), phi(a2, b)) @ cat.comult(a, a2),
                        cat.comult(ca, ca2) @ phi(aa2, b),
                    )
                )
        for a in loops:
            ai = g.inverse(a)
            entries.append(
                ReportEntry.compare(
                    "crossing.identity_path", (a.id,), phi(a, one_x), ident(a)
                )
            )
            entries.append(
                ReportEntry.compare("crossing.self_twist", (a.id,), phi(a, a), ident(a))
            )
            entries.append(
                ReportEntry.compare(
                    "crossing.inverse_twist", (a.id,), phi(a, ai), ident(a)
                )
            )
            for b in paths:
                for c in g.paths_to(b.src):
                    entries.append(
                        ReportEntry.compare(
                            "crossing.composition",
                            (a.id, b.id, c.id),
                            phi(g.conjugate(a, b), c) @ phi(a, b),
                            phi(a, g.compose(c, b)),
                        )
                    )
        for a, b in product(loops, loops):
            instance = (a.id, b.id)
            entries.append(
                ReportEntry.compare(
                    "crossing.braiding",
                    instance,
                    cat.mult(b, a) @ symmetry(cat.dim(a), cat.dim(b), cat.field),
                    cat.mult(g.conjugate(a, b), b) @ tensor(phi(a, b), ident(b)),
                )
            )
            try:
                lhs, rhs = _torus_traces(cfd, a, b)
            except ShapeMismatchError as exc:
                entries.append(
                    ReportEntry.verdict("crossing.torus", instance, False, str(exc))
                )
            else:
                entries.append(
                    ReportEntry.compare("crossing.torus", instance, lhs, rhs)
                )
            entries.append(
                ReportEntry.compare(
                    "crossing.unit_action",
                    instance,
                    phi(one_x, b) @ phi(one_x, a),
                    phi(one_x, g.compose(b, a)),
                )
            )
        for a in loops:
            ai = g.inverse(a)
            entries.append(
                ReportEntry.compare(
                    "crossing.square_commutativity",
                    (a.id,),
                    cat.mult(a, a) @ symmetry(cat.dim(a), cat.dim(a), cat.field),
                    cat.mult(a, a),
                )
            )
            entries.append(
                ReportEntry.compare(
                    "crossing.inverse_commutativity",
                    (a.id,),
                    cat.mult(ai, a) @ symmetry(cat.dim(a), cat.dim(ai), cat.field),
                    cat.mult(a, ai),
                )
            )
            entries.append(
                ReportEntry.compare(
                    "crossing.pairing_symmetry",
                    (a.id,),
                    cat.pairing(a),
                    cat.pairing(ai) @ symmetry(cat.dim(a), cat.dim(ai), cat.field),
                )
            )
            entries.append(
                ReportEntry.compare(
                    "crossing.copairing_symmetry",
                    (a.id,),
                    symmetry(cat.dim(ai), cat.dim(a), cat.field) @ cat.copairing(a),
                    cat.copairing(ai),
                )
            )
    report = Report(name="crossing", entries=entries)
    logger.info(
        "Checked %d crossing instances; %d failed.",
        len(report.entries),
        len(report.failures()),
    )
    return report


def _torus_traces(
    cfd: CrossedFrobData, a: MorRef, b: MorRef
) -> Tuple[ExactMatrix, ExactMatrix]:
    """
    The two traces over a punctured torus with commutator `κ = a b a⁻¹ b⁻¹`:
    tracing `L_a` out of `m_{κ,bab⁻¹} (I_κ ⊗ φ^a_b)` and tracing `L_b` out of
    `φ^{aba⁻¹}_{a⁻¹} m_{κ,b}`.
    """
    cat, g, phi = cfd.base, cfd.groupoid, cfd.crossing
    ai = g.inverse(a)
    kappa = g.commutator(a, b)
    around_a = cat.mult(kappa, g.conjugate(a, b)) @ tensor(cat.ident(kappa), phi(a, b))
    around_b = phi(g.compose_path(a, b, ai), ai) @ cat.mult(kappa, b)
    return (
        partial_trace(cat, kappa, a, around_a),
        partial_trace(cat, kappa, b, around_b),
    )

"""
One-dimensional theories: a representation of a groupoid on coordinate
spaces evaluated on signed points, intervals and circles.

A signed point `+y` stands for the space `V_y` and `-y` for its dual. The
morphism `g: x -> y` acts by `mats(g): V_x -> V_y`, and functoriality reads
`mats(compose(f, g)) = mats(g) @ mats(f)`.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError
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
    compose,
    identity,
    standard_coevaluation,
    standard_evaluation,
    symmetry,
    tensor,
)
from prefect_hqft.groupoid import (
    Groupoid,
    Morphism,
    UnknownMorphismError,
    cyclic_group,
    symmetric_group,
    symmetric_group_elements,
)
from prefect_hqft.reports import Report, ReportEntry
from prefect_hqft.surface import Glue, Tensor

logger = get_logger("hqft.onedim")


class OneCobSyntaxError(ValueError):
    """Raised when one-dimensional expression text cannot be parsed."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(message)
        self.line = line
        self.column = column


class OneCobTypeError(TypeError):
    """Raised when a one-dimensional expression does not typecheck."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class DualizableRep(BaseModel):
    """
    A representation of a groupoid on coordinate spaces.

    Args:
        groupoid: The groupoid acting.
        field: The scalar field.
        dims: `dim V_x` for each object.
        mats: The action of each morphism.

    Examples:
        The circle invariants of the regular representation of a cyclic
        group count fixed points:
        ```python
        from prefect_hqft.groupoid import cyclic_group
        from prefect_hqft.onedim import character, regular_representation

        rep = regular_representation(cyclic_group(3))
        print(character(rep))  # {'e': 3, 'a': 0, 'a2': 0}
        ```
    """

    groupoid: Groupoid = Field(..., description="The groupoid acting.")
    field: FieldSpec = Field(default=RATIONALS, description="The scalar field.")
    dims: Dict[str, int] = Field(..., description="Dimension of each space.")
    mats: Dict[str, ExactMatrix] = Field(..., description="Action of morphisms.")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _validate_shapes(cls, values):
        """
        Every object needs a dimension and every morphism a matrix of shape
        `dim V_tgt x dim V_src`.
        """
        g: Groupoid = values["groupoid"]
        dims, mats = values["dims"], values["mats"]
        if set(dims) != set(g.objects):
            raise ValueError(
                f"Dimensions must be given for exactly the objects {g.objects}."
            )
        if any(n < 0 for n in dims.values()):
            raise ValueError("Dimensions must be non-negative.")
        for ref in g.refs():
            if ref.id not in mats:
                raise ValueError(f"No matrix for morphism '{ref.id}'.")
            matrix = mats[ref.id]
            expected = (dims[ref.tgt], dims[ref.src])
            if matrix.shape != expected:
                raise ValueError(
                    f"mats[{ref.id}] has shape {matrix.shape}, expected {expected}."
                )
            if matrix.field != values["field"]:
                raise ValueError(f"mats[{ref.id}] is over another field.")
        extra = set(mats) - {ref.id for ref in g.refs()}
        if extra:
            raise ValueError(f"Matrices given for unknown morphisms {sorted(extra)}.")
        return values

    def action(self, morphism: Morphism) -> ExactMatrix:
        """`mats(g)`."""
        return self.mats[self.groupoid.morphism(morphism).id]

    def dim(self, obj: str) -> int:
        """`dim V_x`."""
        return self.dims[obj]


def validate_rep(rep: DualizableRep) -> Report:
    """
    Checks the functor laws and that every morphism acts invertibly.
    """
    g, entries = rep.groupoid, []
    for x in g.objects:
        entries.append(
            ReportEntry.compare(
                "rep.identity",
                (x,),
                rep.action(g.identity(x)),
                identity(rep.dim(x), rep.field),
            )
        )
    for f, h in g.composable_pairs():
        entries.append(
            ReportEntry.compare(
                "rep.functoriality",
                (f.id, h.id),
                rep.action(g.compose(f, h)),
                compose(rep.action(f), rep.action(h)),
            )
        )
    for ref in g.refs():
        entries.append(
            ReportEntry.verdict(
                "rep.invertibility",
                (ref.id,),
                rep.action(ref).is_invertible(),
                "singular matrix",
            )
        )
    report = Report(name="representation", entries=entries)
    logger.debug("Representation check: %d failures.", len(report.failures()))
    return report


@dataclass(frozen=True)
class SignedPoint:
    """`+y` or `-y`."""

    sign: str
    obj: str

    def __str__(self) -> str:
        return f"{self.sign}{self.obj}"


@dataclass(frozen=True)
class Ev:
    """`ev(y)`: `+y ⊗ -y -> ∅`."""

    obj: str


@dataclass(frozen=True)
class Coev:
    """`coev(y)`: `∅ -> -y ⊗ +y`."""

    obj: str


@dataclass(frozen=True)
class Interval:
    """`interval(g, ±)`: `±src -> ±tgt`."""

    morphism: str
    sign: str


@dataclass(frozen=True)
class Circle:
    """`circle(g)` for a loop `g`."""

    morphism: str


@dataclass(frozen=True)
class PointIdentity:
    """`id(±x, ...)`."""

    points: Tuple[SignedPoint, ...] = ()


@dataclass(frozen=True)
class PointSwap:
    """`swap(±x, ±y)`."""

    first: SignedPoint
    second: SignedPoint


LineExpr = Union[Ev, Coev, Interval, Circle, PointIdentity, PointSwap, Glue, Tensor]
PointSignature = Tuple[SignedPoint, ...]


_GRAMMAR = r"""
    start: expr

    ?expr: term
         | expr ";" term                                 -> glue

    ?term: factor
         | term "|" factor                               -> tensor

    ?factor: generator
           | "(" expr ")"

    ?generator: "ev" "(" NAME ")"                        -> ev
              | "coev" "(" NAME ")"                      -> coev
              | "interval" "(" NAME "," SIGN ")"         -> interval
              | "circle" "(" NAME ")"                    -> circle
              | "id" "(" points? ")"                     -> identity
              | "swap" "(" point "," point ")"           -> swap

    points: point ("," point)*
    point: SIGN NAME

    SIGN: "+" | "-"
    NAME: /[A-Za-z0-9_][A-Za-z0-9_']*/

    %import common.WS
    %ignore WS
"""

_PARSER = Lark(_GRAMMAR, parser="lalr", propagate_positions=True)


@v_args(inline=True)
class _OneCobBuilder(Transformer):
    def __init__(self, groupoid: Optional[Groupoid] = None):
        super().__init__()
        self._groupoid = groupoid

    def _check(self, token: Token, known: bool, kind: str) -> str:
        if self._groupoid is not None and not known:
            raise OneCobSyntaxError(
                f"Unknown {kind} id '{token}' at line {token.line}, "
                f"column {token.column}.",
                token.line,
                token.column,
            )
        return str(token)

    def _object(self, token: Token) -> str:
        known = self._groupoid is None or str(token) in self._groupoid.objects
        return self._check(token, known, "object")

    def _morphism(self, token: Token) -> str:
        known = self._groupoid is None or self._groupoid.has_morphism(str(token))
        return self._check(token, known, "morphism")

    def start(self, expr):
        return expr

    def glue(self, left, right):
        return Glue(left, right)

    def tensor(self, left, right):
        return Tensor(left, right)

    def ev(self, obj):
        return Ev(self._object(obj))

    def coev(self, obj):
        return Coev(self._object(obj))

    def interval(self, morphism, sign):
        return Interval(self._morphism(morphism), str(sign))

    def circle(self, morphism):
        return Circle(self._morphism(morphism))

    def point(self, sign, obj):
        return SignedPoint(str(sign), self._object(obj))

    def points(self, *points):
        return tuple(points)

    def identity(self, points=()):
        return PointIdentity(points)

    def swap(self, first, second):
        return PointSwap(first, second)


def parse_1d(text: str, groupoid: Optional[Groupoid] = None) -> LineExpr:
    """
    Parses one-dimensional expression text such as
    `"(interval(g, +) | id(-y)) ; ev(y)"`.

    Raises:
        OneCobSyntaxError: With the line and column of the offending input,
            also for an id the groupoid lacks.
    """
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        raise OneCobSyntaxError(
            f"Syntax error at line {exc.line}, column {exc.column}:\n"
            f"{exc.get_context(text).rstrip()}",
            exc.line,
            exc.column,
        ) from None
    try:
        return _OneCobBuilder(groupoid).transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None


def _morphism(g: Groupoid, name: str):
    try:
        return g.morphism(name)
    except UnknownMorphismError:
        raise OneCobTypeError(f"Unknown morphism id '{name}'.") from None


def _point(g: Groupoid, point: SignedPoint) -> SignedPoint:
    if point.obj not in g.objects:
        raise OneCobTypeError(f"Unknown object id '{point.obj}'.")
    return point


def typecheck_1d(
    expr: LineExpr, g: Groupoid
) -> Tuple[PointSignature, PointSignature]:
    """
    The incoming and outgoing signed points of a one-dimensional expression.

    Raises:
        OneCobTypeError: If glued boundaries disagree.
    """
    if isinstance(expr, Glue):
        inputs, middle = typecheck_1d(expr.left, g)
        expected, outputs = typecheck_1d(expr.right, g)
        if middle != expected:
            index = next(
                (k for k, (p, q) in enumerate(zip(middle, expected)) if p != q),
                min(len(middle), len(expected)),
            )
            raise OneCobTypeError(
                f"Cannot glue: the left side ends in {_format_points(middle)} but "
                f"the right side starts from {_format_points(expected)}.",
                index,
            )
        return inputs, outputs
    if isinstance(expr, Tensor):
        left_in, left_out = typecheck_1d(expr.left, g)
        right_in, right_out = typecheck_1d(expr.right, g)
        return left_in + right_in, left_out + right_out
    if isinstance(expr, Ev):
        plus, minus = SignedPoint("+", expr.obj), SignedPoint("-", expr.obj)
        return (_point(g, plus), minus), ()
    if isinstance(expr, Coev):
        plus, minus = SignedPoint("+", expr.obj), SignedPoint("-", expr.obj)
        return (), (_point(g, minus), plus)
    if isinstance(expr, Interval):
        ref = _morphism(g, expr.morphism)
        return (SignedPoint(expr.sign, ref.src),), (SignedPoint(expr.sign, ref.tgt),)
    if isinstance(expr, Circle):
        ref = _morphism(g, expr.morphism)
        if not ref.is_loop:
            raise OneCobTypeError(f"circle({ref.id}): '{ref.id}' is not a loop.")
        return (), ()
    if isinstance(expr, PointIdentity):
        points = tuple(_point(g, point) for point in expr.points)
        return points, points
    if isinstance(expr, PointSwap):
        first, second = _point(g, expr.first), _point(g, expr.second)
        return (first, second), (second, first)
    raise TypeError(f"Not a one-dimensional expression: {expr!r}")


def format_1d(expr: LineExpr) -> str:
    """Prints an expression in the syntax `parse_1d` reads."""
    if isinstance(expr, Glue):
        right = format_1d(expr.right)
        if isinstance(expr.right, Glue):
            right = f"({right})"
        return f"{format_1d(expr.left)} ; {right}"
    if isinstance(expr, Tensor):
        left, right = format_1d(expr.left), format_1d(expr.right)
        if isinstance(expr.left, Glue):
            left = f"({left})"
        if isinstance(expr.right, (Glue, Tensor)):
            right = f"({right})"
        return f"{left} | {right}"
    if isinstance(expr, Ev):
        return f"ev({expr.obj})"
    if isinstance(expr, Coev):
        return f"coev({expr.obj})"
    if isinstance(expr, Interval):
        return f"interval({expr.morphism}, {expr.sign})"
    if isinstance(expr, Circle):
        return f"circle({expr.morphism})"
    if isinstance(expr, PointIdentity):
        return "id(" + ", ".join(str(point) for point in expr.points) + ")"
    if isinstance(expr, PointSwap):
        return f"swap({expr.first}, {expr.second})"
    raise TypeError(f"Not a one-dimensional expression: {expr!r}")


def _format_points(points: Sequence[SignedPoint]) -> str:
    return "[" + ", ".join(str(point) for point in points) + "]"


def evaluate_1d(expr: LineExpr, rep: DualizableRep) -> ExactMatrix:
    """
    The matrix of a one-dimensional expression. Duals use the standard
    evaluation and coevaluation; `interval(g, -)` acts by the transpose of
    `mats(g⁻¹)` and `circle(g)` evaluates to the trace of `mats(g)`.

    Raises:
        OneCobTypeError: If the expression does not typecheck.
    """
    typecheck_1d(expr, rep.groupoid)
    return _evaluate_1d(expr, rep)


def _evaluate_1d(expr: LineExpr, rep: DualizableRep) -> ExactMatrix:
    g, field = rep.groupoid, rep.field
    if isinstance(expr, Glue):
        return compose(_evaluate_1d(expr.left, rep), _evaluate_1d(expr.right, rep))
    if isinstance(expr, Tensor):
        return tensor(_evaluate_1d(expr.left, rep), _evaluate_1d(expr.right, rep))
    if isinstance(expr, Ev):
        return standard_evaluation(rep.dim(expr.obj), field)
    if isinstance(expr, Coev):
        return standard_coevaluation(rep.dim(expr.obj), field)
    if isinstance(expr, Interval):
        if expr.sign == "+":
            return rep.action(expr.morphism)
        return rep.action(g.inverse(expr.morphism)).transpose()
    if isinstance(expr, Circle):
        ref = g.morphism(expr.morphism)
        n = rep.dim(ref.src)
        return (
            standard_evaluation(n, field)
            @ symmetry(n, n, field)
            @ tensor(identity(n, field), rep.action(ref))
            @ standard_coevaluation(n, field)
        )
    if isinstance(expr, PointIdentity):
        size = 1
        for point in expr.points:
            size *= rep.dim(point.obj)
        return identity(size, field)
    if isinstance(expr, PointSwap):
        return symmetry(rep.dim(expr.first.obj), rep.dim(expr.second.obj), field)
    raise TypeError(f"Not a one-dimensional expression: {expr!r}")


def circle_invariant(rep: DualizableRep, loop: Morphism):
    """The value of `circle(g)`: the trace of `mats(g)`."""
    ref = rep.groupoid.morphism(loop)
    if not ref.is_loop:
        raise OneCobTypeError(f"'{ref.id}' is not a loop.")
    return rep.action(ref).trace()


def character(rep: DualizableRep) -> Dict[str, object]:
    """Circle invariants of every loop, keyed by loop id."""
    return {ref.id: circle_invariant(rep, ref) for ref in rep.groupoid.loops()}


def _permutation_matrix(images: Sequence[int], field: FieldSpec) -> ExactMatrix:
    n = len(images)
    rows = [[0] * n for _ in range(n)]
    for source, target in enumerate(images):
        rows[target][source] = 1
    return ExactMatrix.from_rows(rows, field, cols=n)


def regular_representation(
    group: Groupoid, field: FieldSpec = RATIONALS
) -> DualizableRep:
    """
    The regular representation of a one-object groupoid: `g` sends the basis
    vector of `h` to that of `h` followed by `g`.
    """
    if len(group.objects) != 1:
        raise ValueError("The regular representation needs a one-object groupoid.")
    (x,) = group.objects
    elements = group.loops_at(x)
    index = {ref.id: k for k, ref in enumerate(elements)}
    mats = {
        g.id: _permutation_matrix(
            [index[group.compose(h, g).id] for h in elements], field
        )
        for g in elements
    }
    return DualizableRep(
        groupoid=group, field=field, dims={x: len(elements)}, mats=mats
    )


def trivial_representation(
    groupoid: Groupoid, field: FieldSpec = RATIONALS
) -> DualizableRep:
    """Every object gets a line on which every morphism acts trivially."""
    one = ExactMatrix.from_rows([[1]], field)
    return DualizableRep(
        groupoid=groupoid,
        field=field,
        dims={x: 1 for x in groupoid.objects},
        mats={ref.id: one for ref in groupoid.refs()},
    )


def one_dimensional_representation(
    group: Groupoid, values: Dict[str, object], field: FieldSpec = RATIONALS
) -> DualizableRep:
    """
    A one-object groupoid acting on a line by the given scalars. Whether the
    scalars are multiplicative is left to `validate_rep`.
    """
    (x,) = group.objects
    return DualizableRep(
        groupoid=group,
        field=field,
        dims={x: 1},
        mats={
            ref.id: ExactMatrix.from_rows([[values[ref.id]]], field)
            for ref in group.refs()
        },
    )


def sign_representation(field: FieldSpec = RATIONALS) -> DualizableRep:
    """The cyclic group of order two acting on a line by `±1`."""
    return one_dimensional_representation(cyclic_group(2), {"e": 1, "a": -1}, field)


def permutation_representation(
    n: int, field: FieldSpec = RATIONALS
) -> DualizableRep:
    """
    The symmetric group on `n` points permuting the coordinates of an
    `n`-dimensional space.
    """
    elements = symmetric_group_elements(n)
    group = symmetric_group(n)
    mats = {
        name: _permutation_matrix([p(i) for i in range(n)], field)
        for name, p in elements.items()
    }
    return DualizableRep(groupoid=group, field=field, dims={"x": n}, mats=mats)


def sliding_identity(
    morphism: Morphism, g: Groupoid
) -> Tuple[LineExpr, LineExpr]:
    """
    Two expressions `+y ⊗ -z -> ∅` for `g: y -> z` that must agree: moving
    `g` along an interval onto the other strand as `g⁻¹`.
    """
    ref = g.morphism(morphism)
    inverse = g.inverse(ref)
    lhs = Glue(
        Tensor(Interval(ref.id, "+"), PointIdentity((SignedPoint("-", ref.tgt),))),
        Ev(ref.tgt),
    )
    rhs = Glue(
        Tensor(PointIdentity((SignedPoint("+", ref.src),)), Interval(inverse.id, "-")),
        Ev(ref.src),
    )
    return lhs, rhs


def zigzag_identity(obj: str) -> Tuple[LineExpr, LineExpr]:
    """`(id(+y) | coev(y)) ; (ev(y) | id(+y))` against `id(+y)`."""
    plus = PointIdentity((SignedPoint("+", obj),))
    return Glue(Tensor(plus, Coev(obj)), Tensor(Ev(obj), plus)), plus


def check_line_moves(rep: DualizableRep) -> Report:
    """
    Checks the sliding identity for every morphism and the zig-zag identity
    for every object.
    """
    g, entries = rep.groupoid, []
    for ref in g.refs():
        lhs, rhs = sliding_identity(ref, g)
        entries.append(
            ReportEntry.compare(
                "line.sliding", (ref.id,), evaluate_1d(lhs, rep), evaluate_1d(rhs, rep)
            )
        )
    for x in g.objects:
        lhs, rhs = zigzag_identity(x)
        entries.append(
            ReportEntry.compare(
                "line.zigzag", (x,), evaluate_1d(lhs, rep), evaluate_1d(rhs, rep)
            )
        )
    return Report(name="line_moves", entries=entries)


def line_signature_text(signature: Sequence[SignedPoint]) -> str:
    """`[+x, -y]`."""
    return _format_points(signature)

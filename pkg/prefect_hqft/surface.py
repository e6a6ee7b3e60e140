"""
Expressions for surfaces glued from elementary pieces.

Generators:

- `B+(x)`, `B-(x)`: a cap adding or removing a circle labelled `1_x`.
- `C(ε,μ)(α;β)`: a cylinder between circles labelled `α` and `βα^{-εμ}β⁻¹`.
- `D(ε,μ,ν)(α,β;ρ,δ)`: a pair of pants with inner circles `α`, `β` and
  outer circle `(ρα^{-ε}ρ⁻¹δβ^{-μ}δ⁻¹)^ν`.
- `id(α, ...)` and `swap(α, β)`.

A sign `-` marks an incoming circle and `+` an outgoing one. Expressions
combine with `;` (glue, left then right) and `|` (side by side), `|`
binding tighter. The typechecker computes the incoming and outgoing circle
labels of an expression.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from prefect_hqft.groupoid import Groupoid, MorRef, UnknownMorphismError

SIGNS = ("+", "-")

# Role positions of a disc: S (first inner), T (second inner), U (outer).
DISC_INPUT_ORDER = (0, 1, 2)
DISC_OUTPUT_ORDER = (1, 0, 2)
CANONICAL_DISC_PATTERNS = ("--+", "---", "++-", "+++")


class SurfaceSyntaxError(ValueError):
    """The expression text does not parse"""

    def __init__(self, message: str, line: int = None, column: int = None):
        super().__init__(message)
        self.line = line
        self.column = column


class UnknownIdentifierError(SurfaceSyntaxError):
    """The expression names a morphism or object the groupoid lacks"""


class SurfaceTypeError(TypeError):
    """Boundary labels do not match where pieces are glued"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Cap:
    """`B±(x)`."""

    sign: str
    obj: str


@dataclass(frozen=True)
class Cylinder:
    """`C(ε,μ)(α;β)`."""

    eps: str
    mu: str
    loop: str
    path: str


@dataclass(frozen=True)
class Disc:
    """`D(ε,μ,ν)(α,β;ρ,δ)`."""

    eps: str
    mu: str
    nu: str
    alpha: str
    beta: str
    rho: str
    delta: str

    @property
    def pattern(self) -> str:
        """The sign pattern, e.g. `"--+"`."""
        return self.eps + self.mu + self.nu

    @property
    def is_canonical(self) -> bool:
        """Whether the disc is evaluated directly rather than by rotation."""
        return self.pattern in CANONICAL_DISC_PATTERNS


@dataclass(frozen=True)
class Identity:
    """`id(α, ...)`; with no labels, the empty surface."""

    loops: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Swap:
    """`swap(α, β)`."""

    first: str
    second: str


@dataclass(frozen=True)
class Glue:
    """`left ; right`."""

    left: "SurfaceExpr"
    right: "SurfaceExpr"


@dataclass(frozen=True)
class Tensor:
    """`left | right`."""

    left: "SurfaceExpr"
    right: "SurfaceExpr"


Generator = Union[Cap, Cylinder, Disc, Identity, Swap]
SurfaceExpr = Union[Cap, Cylinder, Disc, Identity, Swap, Glue, Tensor]
Signature = Tuple[MorRef, ...]

EMPTY = Identity(())


def glue(*parts: SurfaceExpr) -> SurfaceExpr:
    """Glues parts left to right, dropping empty identities."""
    kept = [part for part in parts if part != EMPTY]
    if not kept:
        return EMPTY
    result = kept[0]
    for part in kept[1:]:
        result = Glue(result, part)
    return result


def parallel(*parts: SurfaceExpr) -> SurfaceExpr:
    """Places parts side by side, dropping empty identities."""
    kept = [part for part in parts if part != EMPTY]
    if not kept:
        return EMPTY
    result = kept[0]
    for part in kept[1:]:
        result = Tensor(result, part)
    return result


def ids(*loops: Union[MorRef, str]) -> Identity:
    """`id` over the given labels."""
    return Identity(tuple(str(loop) for loop in loops))


_GRAMMAR = r"""
    start: expr

    ?expr: term
         | expr ";" term                                   -> glue

    ?term: factor
         | term "|" factor                                 -> tensor

    ?factor: generator
           | "(" expr ")"

    ?generator: "B" SIGN "(" NAME ")"                            -> cap
              | "C" "(" SIGN "," SIGN ")" "(" NAME ";" NAME ")"  -> cylinder
              | "D" "(" SIGN "," SIGN "," SIGN ")" disc_ids      -> disc
              | "id" "(" names? ")"                              -> identity
              | "swap" "(" NAME "," NAME ")"                     -> swap

    disc_ids: "(" NAME "," NAME ";" NAME "," NAME ")"
    names: NAME ("," NAME)*

    SIGN: "+" | "-"
    NAME: /[A-Za-z0-9_][A-Za-z0-9_']*/

    %import common.WS
    %ignore WS
"""

_PARSER = Lark(_GRAMMAR, parser="lalr", propagate_positions=True)


@v_args(inline=True)
class _SurfaceBuilder(Transformer):
    def __init__(self, groupoid: Optional[Groupoid] = None):
        super().__init__()
        self._groupoid = groupoid

    def _morphism(self, token: Token) -> str:
        name = str(token)
        if self._groupoid is not None and not self._groupoid.has_morphism(name):
            raise UnknownIdentifierError(
                f"Unknown morphism id '{name}' at line {token.line}, "
                f"column {token.column}.",
                token.line,
                token.column,
            )
        return name

    def _object(self, token: Token) -> str:
        name = str(token)
        if self._groupoid is not None and name not in self._groupoid.objects:
            raise UnknownIdentifierError(
                f"Unknown object id '{name}' at line {token.line}, "
                f"column {token.column}.",
                token.line,
                token.column,
            )
        return name

    def start(self, expr):
        return expr

    def glue(self, left, right):
        return Glue(left, right)

    def tensor(self, left, right):
        return Tensor(left, right)

    def cap(self, sign, obj):
        return Cap(str(sign), self._object(obj))

    def cylinder(self, eps, mu, loop, path):
        return Cylinder(str(eps), str(mu), self._morphism(loop), self._morphism(path))

    def disc_ids(self, *tokens):
        return tuple(self._morphism(token) for token in tokens)

    def disc(self, eps, mu, nu, labels):
        return Disc(str(eps), str(mu), str(nu), *labels)

    def names(self, *tokens):
        return tuple(self._morphism(token) for token in tokens)

    def identity(self, loops=()):
        return Identity(loops)

    def swap(self, first, second):
        return Swap(self._morphism(first), self._morphism(second))


def parse(text: str, groupoid: Optional[Groupoid] = None) -> SurfaceExpr:
    """
    Parses surface expression text.

    Args:
        text: The expression, e.g. `"B+(x) ; B-(x)"`.
        groupoid: When given, every id must name one of its morphisms or
            objects.

    Raises:
        SurfaceSyntaxError: With the line and column of the offending input.
        UnknownIdentifierError: For an id the groupoid lacks.
    """
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        raise SurfaceSyntaxError(
            f"Syntax error at line {exc.line}, column {exc.column}:\n"
            f"{exc.get_context(text).rstrip()}",
            exc.line,
            exc.column,
        ) from None
    try:
        return _SurfaceBuilder(groupoid).transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None


def format_expression(expr: SurfaceExpr) -> str:
    """
    Renders an expression as text that parses back to the same expression.
    """
    if isinstance(expr, Glue):
        right = format_expression(expr.right)
        if isinstance(expr.right, Glue):
            right = f"({right})"
        return f"{format_expression(expr.left)} ; {right}"
    if isinstance(expr, Tensor):
        left, right = format_expression(expr.left), format_expression(expr.right)
        if isinstance(expr.left, Glue):
            left = f"({left})"
        if isinstance(expr.right, (Glue, Tensor)):
            right = f"({right})"
        return f"{left} | {right}"
    if isinstance(expr, Cap):
        return f"B{expr.sign}({expr.obj})"
    if isinstance(expr, Cylinder):
        return f"C({expr.eps},{expr.mu})({expr.loop};{expr.path})"
    if isinstance(expr, Disc):
        return (
            f"D({expr.eps},{expr.mu},{expr.nu})"
            f"({expr.alpha},{expr.beta};{expr.rho},{expr.delta})"
        )
    if isinstance(expr, Identity):
        return f"id({', '.join(expr.loops)})"
    if isinstance(expr, Swap):
        return f"swap({expr.first}, {expr.second})"
    raise TypeError(f"Not a surface expression: {expr!r}")


def _exponent(sign: str) -> int:
    return 1 if sign == "+" else -1


def _resolve(g: Groupoid, name: str) -> MorRef:
    try:
        return g.morphism(name)
    except UnknownMorphismError:
        raise SurfaceTypeError(f"Unknown morphism id '{name}'.") from None


def _loop(g: Groupoid, name: str, where: str) -> MorRef:
    ref = _resolve(g, name)
    if not ref.is_loop:
        raise SurfaceTypeError(f"{where}: '{name}' is not a loop.")
    return ref


def cylinder_labels(cylinder: Cylinder, g: Groupoid) -> Tuple[MorRef, MorRef]:
    """
    The labels of the two circles of a cylinder: `α` and `βα^{-εμ}β⁻¹`.

    Raises:
        SurfaceTypeError: If `α` is not a loop or `β` does not end at its base.
    """
    where = format_expression(cylinder)
    alpha = _loop(g, cylinder.loop, where)
    beta = _resolve(g, cylinder.path)
    if beta.tgt != alpha.src:
        raise SurfaceTypeError(
            f"{where}: '{beta.id}' ends at '{beta.tgt}', not at the base "
            f"'{alpha.src}' of '{alpha.id}'."
        )
    exponent = -_exponent(cylinder.eps) * _exponent(cylinder.mu)
    return alpha, g.conjugate(g.power(alpha, exponent), beta)


def disc_labels(disc: Disc, g: Groupoid) -> Tuple[MorRef, MorRef, MorRef]:
    """
    The labels of the circles of a disc in role order: `α`, `β` and the
    outer label `(ρα^{-ε}ρ⁻¹δβ^{-μ}δ⁻¹)^ν`.

    Raises:
        SurfaceTypeError: On non-loop inner labels or mismatched endpoints.
    """
    where = format_expression(disc)
    alpha = _loop(g, disc.alpha, where)
    beta = _loop(g, disc.beta, where)
    rho, delta = _resolve(g, disc.rho), _resolve(g, disc.delta)
    if rho.tgt != alpha.src or delta.tgt != beta.src:
        raise SurfaceTypeError(
            f"{where}: the paths must end at the bases of '{alpha.id}' and "
            f"'{beta.id}'."
        )
    if rho.src != delta.src:
        raise SurfaceTypeError(
            f"{where}: the paths '{rho.id}' and '{delta.id}' start at different "
            "objects."
        )
    inner = g.compose(
        g.conjugate(g.power(alpha, -_exponent(disc.eps)), rho),
        g.conjugate(g.power(beta, -_exponent(disc.mu)), delta),
    )
    return alpha, beta, g.power(inner, _exponent(disc.nu))


def outer_label(disc: Disc, g: Groupoid) -> MorRef:
    """The label of the outer circle of a disc."""
    return disc_labels(disc, g)[2]


def rotate_disc(disc: Disc, g: Groupoid) -> Disc:
    """
    `D(ε,μ,ν)(α,β;ρ,δ)` to `D(μ,ν,ε)(β,γ;ρ⁻¹δ,ρ⁻¹)` with `γ` the
    outer label.
    The new roles are the old (second inner, outer, first inner); rotating
    three times gives back the original disc.
    """
    gamma = outer_label(disc, g)
    rho_inverse = g.inverse(disc.rho)
    return Disc(
        disc.mu,
        disc.nu,
        disc.eps,
        disc.beta,
        gamma.id,
        g.compose(rho_inverse, disc.delta).id,
        rho_inverse.id,
    )


def typecheck(expr: SurfaceExpr, g: Groupoid) -> Tuple[Signature, Signature]:
    """
    The incoming and outgoing circle labels of an expression.

    Raises:
        SurfaceTypeError: If glued boundaries disagree, with `index` set to
            the first disagreeing position.
    """
    if isinstance(expr, Glue):
        inputs, middle = typecheck(expr.left, g)
        expected, outputs = typecheck(expr.right, g)
        if middle != expected:
            index = next(
                (k for k, (a, b) in enumerate(zip(middle, expected)) if a != b),
                min(len(middle), len(expected)),
            )
            raise SurfaceTypeError(
                f"Cannot glue: the left side ends in {format_signature(middle)} "
                f"but the right side starts from {format_signature(expected)}; "
                f"first mismatch at position {index}.",
                index,
            )
        return inputs, outputs
    if isinstance(expr, Tensor):
        left_in, left_out = typecheck(expr.left, g)
        right_in, right_out = typecheck(expr.right, g)
        return left_in + right_in, left_out + right_out
    if isinstance(expr, Cap):
        if expr.obj not in g.objects:
            raise SurfaceTypeError(f"Unknown object id '{expr.obj}'.")
        unit = (g.identity(expr.obj),)
        return ((), unit) if expr.sign == "+" else (unit, ())
    if isinstance(expr, Cylinder):
        labels = cylinder_labels(expr, g)
        signs = (expr.eps, expr.mu)
        return (
            tuple(labels[k] for k in (0, 1) if signs[k] == "-"),
            tuple(labels[k] for k in (1, 0) if signs[k] == "+"),
        )
    if isinstance(expr, Disc):
        labels = disc_labels(expr, g)
        return (
            tuple(labels[k] for k in DISC_INPUT_ORDER if expr.pattern[k] == "-"),
            tuple(labels[k] for k in DISC_OUTPUT_ORDER if expr.pattern[k] == "+"),
        )
    if isinstance(expr, Identity):
        loops = tuple(_loop(g, name, format_expression(expr)) for name in expr.loops)
        return loops, loops
    if isinstance(expr, Swap):
        where = format_expression(expr)
        first, second = _loop(g, expr.first, where), _loop(g, expr.second, where)
        return (first, second), (second, first)
    raise TypeError(f"Not a surface expression: {expr!r}")


def format_signature(signature: Sequence[MorRef]) -> str:
    """`[a, b]`."""
    return "[" + ", ".join(ref.id for ref in signature) + "]"


def dual_labels(labels: Sequence[MorRef], g: Groupoid) -> Tuple[MorRef, ...]:
    """The dual boundary: reversed order, inverted labels."""
    return tuple(g.inverse(ref) for ref in reversed(labels))


def evaluation_surface(labels: Sequence[MorRef], g: Groupoid) -> SurfaceExpr:
    """A surface `M ⊗ M* -> ∅` for the boundary `M`."""
    if not labels:
        return EMPTY
    first, rest = labels[0], labels[1:]
    if not rest:
        return Cylinder("-", "-", first.id, g.identity(first.src).id)
    return glue(
        parallel(ids(first), evaluation_surface(rest, g), ids(g.inverse(first))),
        evaluation_surface([first], g),
    )


def coevaluation_surface(labels: Sequence[MorRef], g: Groupoid) -> SurfaceExpr:
    """A surface `∅ -> M* ⊗ M` for the boundary `M`."""
    if not labels:
        return EMPTY
    first, rest = labels[0], labels[1:]
    if not rest:
        return Cylinder("+", "+", first.id, g.identity(first.src).id)
    return glue(
        coevaluation_surface(rest, g),
        parallel(
            ids(*dual_labels(rest, g)),
            coevaluation_surface([first], g),
            ids(*rest),
        ),
    )


def dualize(expr: SurfaceExpr, g: Groupoid) -> SurfaceExpr:
    """
    The dual surface `M₁* -> M₀*` of `expr: M₀ -> M₁`.
    """
    inputs, outputs = typecheck(expr, g)
    inputs_dual, outputs_dual = dual_labels(inputs, g), dual_labels(outputs, g)
    return glue(
        parallel(coevaluation_surface(inputs, g), ids(*outputs_dual)),
        parallel(ids(*inputs_dual), expr, ids(*outputs_dual)),
        parallel(ids(*inputs_dual), evaluation_surface(outputs, g)),
    )


def _common_base(g: Groupoid, first: str, second: str) -> Tuple[MorRef, MorRef, str]:
    a, b = _resolve(g, first), _resolve(g, second)
    if not (a.is_loop and b.is_loop and a.src == b.src):
        raise SurfaceTypeError(
            f"'{a.id}' and '{b.id}' must be loops at the same object."
        )
    return a, b, a.src


def punctured_torus(
    first: str, second: str, g: Groupoid, form: str = "alpha"
) -> SurfaceExpr:
    """
    A torus with one outgoing-side puncture labelled by the commutator
    `κ = a b a⁻¹ b⁻¹`, as a surface `[κ] -> ∅`.

    Args:
        first: The loop `a`.
        second: The loop `b`.
        g: The groupoid.
        form: `"alpha"` cuts along the `a` circle, `"beta"` along the `b`
            circle; both describe the same surface.
    """
    a, b, x = _common_base(g, first, second)
    kappa, one = g.commutator(a, b), g.identity(x)
    if form == "alpha":
        cut, path_in, path_out = a, one, b
    elif form == "beta":
        cut, path_in, path_out = b, g.inverse(a), g.inverse(a)
    else:
        raise ValueError(f"Unknown punctured torus form '{form}'.")
    cut_inverse = g.inverse(cut)
    return glue(
        parallel(ids(kappa), Cylinder("+", "+", cut_inverse.id, one.id)),
        parallel(
            Disc("-", "-", "+", kappa.id, cut.id, path_in.id, path_out.id),
            ids(cut_inverse),
        ),
        Cylinder("-", "-", cut.id, one.id),
    )


def torus(first: str, second: str, g: Groupoid, form: str = "alpha") -> SurfaceExpr:
    """A closed torus; typechecks only for commuting loops."""
    _, _, x = _common_base(g, first, second)
    return glue(Cap("+", x), punctured_torus(first, second, g, form))


def sphere(obj: str) -> SurfaceExpr:
    """`B+(x) ; B-(x)`."""
    return glue(Cap("+", obj), Cap("-", obj))


def generators(expr: SurfaceExpr) -> List[Generator]:
    """The generators of an expression from left to right."""
    if isinstance(expr, (Glue, Tensor)):
        return generators(expr.left) + generators(expr.right)
    return [expr]

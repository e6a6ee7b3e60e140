"""
Exact scalar fields and the strict symmetric monoidal category of matrices.

A linear map `f: A -> B` between coordinate spaces is stored as a
`dim(B) x dim(A)` matrix acting on column vectors. Composition is written in
diagrammatic order (`compose(f, g)` is "f, then g"), the tensor product is
the Kronecker product with the left factor most significant, and the
monoidal unit is the 1-dimensional space.
"""

from functools import lru_cache, reduce
from typing import List, Optional, Sequence, Tuple, Union

try:
    from typing import Literal
except ImportError:
    from typing_extensions import Literal

from pydantic import VERSION as PYDANTIC_VERSION
from sympy import GF, QQ, Rational, isprime, sympify
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.polyerrors import CoercionFailed

if PYDANTIC_VERSION.startswith("2."):
    from pydantic.v1 import BaseModel, Field, root_validator
else:
    from pydantic import BaseModel, Field, root_validator

Scalar = Union[int, str]


class ShapeMismatchError(ValueError):
    """Matrix shapes are incompatible for the requested operation"""


class FieldMismatchError(ValueError):
    """Matrices over different scalar fields were combined"""


class SingularMatrixError(ValueError):
    """A matrix that had to be inverted is singular"""


@lru_cache(maxsize=None)
def _prime_field(p: int):
    return GF(p, symmetric=False)


class FieldSpec(BaseModel):
    """
    The exact scalar field a category or representation is defined over.

    Args:
        kind: Either `"rationals"` or `"prime-field"`.
        p: The characteristic, required for and only for a prime field.

    Examples:
        Work over the field with five elements:
        ```python
        from prefect_hqft.exactlin import ExactMatrix, FieldSpec

        gf5 = FieldSpec(kind="prime-field", p=5)
        twice = ExactMatrix.from_rows([[2]], field=gf5)
        print(twice.inverse().to_rows())  # [[3]]
        ```
    """

    kind: Literal["rationals", "prime-field"] = Field(
        default="rationals", description="The kind of exact field."
    )
    p: Optional[int] = Field(
        default=None, description="The characteristic of a prime field."
    )

    class Config:
        frozen = True

    @root_validator(pre=True)
    def _validate_characteristic(cls, values):
        """
        A prime field needs a prime `p`; the rationals take none.
        """
        kind = values.get("kind", "rationals")
        p = values.get("p")
        if kind == "prime-field":
            if p is None:
                raise ValueError("A prime-field requires the characteristic `p`.")
            if not isprime(int(p)):
                raise ValueError(f"The characteristic p={p} is not a prime.")
        elif p is not None:
            raise ValueError("Only a prime-field takes a characteristic `p`.")
        return values

    @property
    def domain(self):
        """The sympy domain matrices over this field live in."""
        if self.kind == "prime-field":
            return _prime_field(self.p)
        return QQ

    def element(self, value):
        """
        Converts an int, a fraction string such as `"3/4"`, a sympy number or
        an element of `self.domain` into an element of `self.domain`.

        Raises:
            ValueError: If the value does not denote an element of the field.
        """
        domain = self.domain
        if domain.of_type(value):
            return value
        try:
            number = Rational(value) if isinstance(value, str) else sympify(value)
            return domain.from_sympy(number)
        except (CoercionFailed, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(
                f"{value!r} is not a scalar of the {self.describe()}."
            ) from exc

    def serialize(self, element) -> Scalar:
        """
        Text form of a scalar: `"p/q"` or `"n"` over the rationals, an
        integer in `[0, p)` over a prime field.
        """
        number = self.domain.to_sympy(element)
        if self.kind == "prime-field":
            return int(number) % self.p
        return str(number)

    def to_number(self, element):
        """The sympy number an element of `self.domain` stands for."""
        number = self.domain.to_sympy(element)
        if self.kind == "prime-field":
            return sympify(int(number) % self.p)
        return number

    def describe(self) -> str:
        """Human-readable field name."""
        if self.kind == "prime-field":
            return f"prime field GF({self.p})"
        return "rational field"


RATIONALS = FieldSpec(kind="rationals")


class ExactMatrix:
    """
    An immutable dense matrix over an exact field.

    Instances compare by shape, field and entries. The product operator `@`
    is the ordinary matrix product, so `g @ f` is `compose(f, g)`.
    """

    __slots__ = ("_rep", "_field")

    def __init__(self, rep: DomainMatrix, field: FieldSpec):
        self._rep = rep
        self._field = field

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence],
        field: FieldSpec = RATIONALS,
        cols: Optional[int] = None,
    ) -> "ExactMatrix":
        """
        Builds a matrix from a list of rows of scalars.

        Args:
            rows: The entries, row by row.
            field: The field the entries are read in.
            cols: The column count, only needed when `rows` is empty.

        Raises:
            ShapeMismatchError: If the rows are ragged.
            ValueError: If an entry is not a scalar of the field.
        """
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise ShapeMismatchError(f"Ragged rows with lengths {sorted(widths)}.")
        width = widths.pop() if widths else (cols or 0)
        if cols is not None and width != cols:
            raise ShapeMismatchError(f"Expected {cols} columns, found {width}.")
        elements = [[field.element(value) for value in row] for row in rows]
        return cls._from_elements(elements, (len(rows), width), field)

    @classmethod
    def _from_elements(
        cls, elements: List[List], shape: Tuple[int, int], field: FieldSpec
    ) -> "ExactMatrix":
        rep = DomainMatrix(elements, shape, field.domain).to_dense()
        return cls(rep, field)

    @property
    def field(self) -> FieldSpec:
        """The scalar field."""
        return self._field

    @property
    def shape(self) -> Tuple[int, int]:
        """`(rows, cols)`."""
        return self._rep.shape

    @property
    def rows(self) -> int:
        """The row count, i.e. the dimension of the target."""
        return self._rep.shape[0]

    @property
    def cols(self) -> int:
        """The column count, i.e. the dimension of the source."""
        return self._rep.shape[1]

    def elements(self) -> List[List]:
        """Entries as elements of the field's sympy domain."""
        return self._rep.to_list()

    def to_rows(self) -> List[List[Scalar]]:
        """Entries in their serialized text form."""
        serialize = self._field.serialize
        return [[serialize(x) for x in row] for row in self.elements()]

    def entry(self, i: int, j: int):
        """The entry at row `i`, column `j` as a sympy number."""
        return self._field.to_number(self.elements()[i][j])

    def scalar(self):
        """The single entry of a 1x1 matrix as a sympy number."""
        if self.shape != (1, 1):
            raise ShapeMismatchError(f"A {self.shape} matrix is not a scalar.")
        return self.entry(0, 0)

    def trace(self):
        """The sum of the diagonal entries as a sympy number."""
        if self.rows != self.cols:
            raise ShapeMismatchError(f"Trace of a non-square {self.shape} matrix.")
        elements = self.elements()
        total = reduce(
            lambda acc, i: acc + elements[i][i],
            range(self.rows),
            self._field.domain.zero,
        )
        return self._field.to_number(total)

    def transpose(self) -> "ExactMatrix":
        """The transposed matrix."""
        elements = self.elements()
        rows = [[elements[i][j] for i in range(self.rows)] for j in range(self.cols)]
        return ExactMatrix._from_elements(rows, (self.cols, self.rows), self._field)

    def inverse(self) -> "ExactMatrix":
        """
        The inverse of a square matrix.

        Raises:
            ShapeMismatchError: If the matrix is not square.
            SingularMatrixError: If the matrix is not invertible.
        """
        if self.rows != self.cols:
            raise ShapeMismatchError(f"Cannot invert a non-square {self.shape} matrix.")
        if self.rows == 0:
            return self
        try:
            return ExactMatrix(self._rep.inv().to_dense(), self._field)
        except (DMNonInvertibleMatrixError, ZeroDivisionError) as exc:
            raise SingularMatrixError("The matrix is singular.") from exc

    def is_invertible(self) -> bool:
        """Whether the matrix is square and non-singular."""
        try:
            self.inverse()
        except (ShapeMismatchError, SingularMatrixError):
            return False
        return True

    def scale(self, value) -> "ExactMatrix":
        """Multiplies every entry by a scalar."""
        factor = self._field.element(value)
        rows = [[x * factor for x in row] for row in self.elements()]
        return ExactMatrix._from_elements(rows, self.shape, self._field)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        _check_fields(self, other)
        if self.cols != other.rows:
            raise ShapeMismatchError(
                f"Cannot multiply a {self.shape} matrix by a {other.shape} matrix."
            )
        if self.cols == 0:
            return zeros(self.rows, other.cols, self._field)
        return ExactMatrix(self._rep.matmul(other._rep).to_dense(), self._field)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self._field == other._field
            and self.elements() == other.elements()
        )

    def __hash__(self) -> int:
        return hash((self.shape, self._field, str(self.to_rows())))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.to_rows()!r}, field={self._field.describe()!r})"

    def format(self) -> str:
        """Aligned, row-per-line text rendering for terminals."""
        cells = [[str(x) for x in row] for row in self.to_rows()]
        if not cells or not cells[0]:
            return f"<empty {self.rows}x{self.cols} matrix>"
        width = max(len(cell) for row in cells for cell in row)
        return "\n".join(
            "[ " + "  ".join(cell.rjust(width) for cell in row) + " ]"
            for row in cells
        )


def _check_fields(*matrices: ExactMatrix) -> None:
    fields = {m.field for m in matrices}
    if len(fields) > 1:
        names = sorted(field.describe() for field in fields)
        raise FieldMismatchError(f"Cannot combine matrices over {names}.")


def zeros(rows: int, cols: int, field: FieldSpec = RATIONALS) -> ExactMatrix:
    """The zero map from a `cols`- to a `rows`-dimensional space."""
    zero = field.domain.zero
    return ExactMatrix._from_elements(
        [[zero] * cols for _ in range(rows)], (rows, cols), field
    )


def identity(n: int, field: FieldSpec = RATIONALS) -> ExactMatrix:
    """The identity of an `n`-dimensional space."""
    domain = field.domain
    rows = [[domain.one if i == j else domain.zero for j in range(n)] for i in range(n)]
    return ExactMatrix._from_elements(rows, (n, n), field)


def compose(*maps: ExactMatrix) -> ExactMatrix:
    """
    Composes maps in diagrammatic order: `compose(f, g)` applies `f` first.

    Raises:
        ShapeMismatchError: If a target dimension differs from the next source.
    """
    if not maps:
        raise ValueError("compose needs at least one map.")
    result = maps[0]
    for step, following in enumerate(maps[1:], start=1):
        if result.rows != following.cols:
            raise ShapeMismatchError(
                f"Map {step} has source dimension {following.cols} but the "
                f"preceding composite has target dimension {result.rows}."
            )
        result = following @ result
    return result


def tensor(*maps: ExactMatrix) -> ExactMatrix:
    """
    Kronecker product, left factor most significant: basis vector
    `(i, k)` of `f ⊗ g` sits at index `i * rows(g) + k`. With no arguments,
    returns the 1x1 identity over the rationals.
    """
    if not maps:
        return identity(1)
    _check_fields(*maps)
    return reduce(_kronecker, maps)


def _kronecker(f: ExactMatrix, g: ExactMatrix) -> ExactMatrix:
    a, b = f.elements(), g.elements()
    rows = [
        [a[i][j] * b[k][l] for j in range(f.cols) for l in range(g.cols)]
        for i in range(f.rows)
        for k in range(g.rows)
    ]
    return ExactMatrix._from_elements(
        rows, (f.rows * g.rows, f.cols * g.cols), f.field
    )


def permutation(
    dims: Sequence[int], order: Sequence[int], field: FieldSpec = RATIONALS
) -> ExactMatrix:
    """
    The map permuting tensor factors of dimensions `dims` so that output
    factor `i` is input factor `order[i]`.

    Raises:
        ValueError: If `order` is not a permutation of the factor positions.
    """
    if sorted(order) != list(range(len(dims))):
        raise ValueError(f"{list(order)} is not a permutation of {len(dims)} factors.")
    out_dims = [dims[k] for k in order]
    size = reduce(lambda acc, d: acc * d, dims, 1)
    domain = field.domain
    rows = [[domain.zero] * size for _ in range(size)]
    for source in range(size):
        digits = _digits(source, dims)
        rows[_index([digits[k] for k in order], out_dims)][source] = domain.one
    return ExactMatrix._from_elements(rows, (size, size), field)


def symmetry(m: int, n: int, field: FieldSpec = RATIONALS) -> ExactMatrix:
    """The swap `V_m ⊗ V_n -> V_n ⊗ V_m` sending `e_i ⊗ e_j` to `e_j ⊗ e_i`."""
    return permutation([m, n], [1, 0], field)


def standard_evaluation(n: int, field: FieldSpec = RATIONALS) -> ExactMatrix:
    """The pairing `V ⊗ V* -> I`, entry `δ_ij` at index `i * n + j`."""
    domain = field.domain
    row = [domain.one if i == j else domain.zero for i in range(n) for j in range(n)]
    return ExactMatrix._from_elements([row], (1, n * n), field)


def standard_coevaluation(n: int, field: FieldSpec = RATIONALS) -> ExactMatrix:
    """The copairing `I -> V* ⊗ V`, entry `δ_jk` at index `j * n + k`."""
    return standard_evaluation(n, field).transpose()


def _digits(index: int, dims: Sequence[int]) -> List[int]:
    digits = []
    for d in reversed(dims):
        index, digit = divmod(index, d)
        digits.append(digit)
    return digits[::-1]


def _index(digits: Sequence[int], dims: Sequence[int]) -> int:
    index = 0
    for digit, d in zip(digits, dims):
        index = index * d + digit
    return index

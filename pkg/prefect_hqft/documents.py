"""
JSON documents for groupoids, categories and representations.

Matrices are row-major arrays of scalars, each an integer or a fraction
string over the rationals and an integer in `[0, p)` over a prime field.
Structure maps labelled by a pair are keyed `"a,b"`; crossings are keyed
`"a|b"` for `φ^a_b`.
"""

import json
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

try:
    from typing import Literal
except ImportError:
    from typing_extensions import Literal

from prefect.logging import get_logger
from pydantic import VERSION as PYDANTIC_VERSION

if PYDANTIC_VERSION.startswith("2."):
    from pydantic.v1 import BaseModel, Field, StrictInt, StrictStr, ValidationError
else:
    from pydantic import BaseModel, Field, StrictInt, StrictStr, ValidationError

from prefect_hqft.exactlin import RATIONALS, ExactMatrix, FieldSpec
from prefect_hqft.groupoid import Groupoid
from prefect_hqft.gvcat import CategoryLike, CrossedFrobData, GVCategory
from prefect_hqft.onedim import DualizableRep

logger = get_logger("hqft.documents")

Rows = List[List[Union[StrictInt, StrictStr]]]
PathLike = Union[str, Path]


class DocumentError(ValueError):
    """Raised when a document cannot be read into a valid structure."""


class CategoryDocument(BaseModel):
    """
    The file form of a category, crossed or not.

    Examples:
        The groupoid algebra of the cyclic group of order two:
        ```json
        {
          "field": {"kind": "rationals"},
          "grading": "loops",
          "dims": {"e": 1, "a": 1},
          "m": {"e,e": [[1]], "e,a": [[1]], "a,e": [[1]], "a,a": [[1]]},
          "j": {"x": [[1]]}
        }
        ```
    """

    field: FieldSpec = Field(default=RATIONALS, description="The scalar field.")
    grading: Literal["all", "loops"] = Field(
        default="loops", description="Which morphisms carry spaces."
    )
    dims: Dict[str, int] = Field(..., description="Dimension of each space.")
    m: Dict[str, Rows] = Field(..., description="Multiplication, keyed 'a,b'.")
    j: Dict[str, Rows] = Field(..., description="Units, keyed by object.")
    delta: Optional[Dict[str, Rows]] = Field(
        default=None, description="Comultiplication, keyed 'a,b'."
    )
    nu: Optional[Dict[str, Rows]] = Field(
        default=None, description="Counits, keyed by object."
    )
    eta: Optional[Dict[str, Rows]] = Field(
        default=None, description="Pairings, keyed by morphism."
    )
    coev: Optional[Dict[str, Rows]] = Field(
        default=None, description="Copairings, keyed by morphism."
    )
    phi: Optional[Dict[str, Rows]] = Field(
        default=None, description="Crossings, keyed 'a|b'."
    )


class RepDocument(BaseModel):
    """The file form of a representation."""

    field: FieldSpec = Field(default=RATIONALS, description="The scalar field.")
    dims: Dict[str, int] = Field(..., description="Dimension of each space.")
    mats: Dict[str, Rows] = Field(..., description="Action of each morphism.")


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"Cannot read {path}: {exc}") from exc


def _parse(model, text: str, source: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source} is not valid JSON: {exc}") from exc
    try:
        return model.parse_obj(data)
    except ValidationError as exc:
        raise DocumentError(f"{source} is not a valid document:\n{exc}") from exc


def _split(key: str, separator: str) -> Tuple[str, str]:
    parts = key.split(separator)
    if len(parts) != 2 or not all(parts):
        raise DocumentError(f"Key '{key}' is not of the form 'a{separator}b'.")
    return parts[0].strip(), parts[1].strip()


def _matrix(rows: Rows, field: FieldSpec, cols: int, label: str) -> ExactMatrix:
    try:
        return ExactMatrix.from_rows(rows, field, cols=cols if not rows else None)
    except ValueError as exc:
        raise DocumentError(f"Entry {label}: {exc}") from exc


def _dims(doc, key: str) -> int:
    try:
        return doc.dims[key]
    except KeyError:
        raise DocumentError(f"Missing dimension for '{key}'.") from None


def _pair_block(
    doc, name: str, g: Groupoid
) -> Optional[Dict[Tuple[str, str], ExactMatrix]]:
    table = getattr(doc, name)
    if table is None:
        return None
    separator = "|" if name == "phi" else ","
    block = {}
    for key, rows in table.items():
        a, b = _split(key, separator)
        if not (g.has_morphism(a) and g.has_morphism(b)):
            raise DocumentError(f"{name}[{key}] names an unknown morphism.")
        if name == "m":
            cols = _dims(doc, a) * _dims(doc, b)
        elif name == "delta":
            cols = _dims(doc, _compose_id(g, a, b, key))
        else:
            cols = _dims(doc, a)
        block[(a, b)] = _matrix(rows, doc.field, cols, f"{name}[{key}]")
    return block


def _compose_id(g: Groupoid, a: str, b: str, key: str) -> str:
    try:
        return g.compose(a, b).id
    except (KeyError, ValueError, LookupError) as exc:
        raise DocumentError(f"delta[{key}]: {exc}") from exc


def _single_block(doc, name: str, g: Groupoid) -> Optional[Dict[str, ExactMatrix]]:
    table = getattr(doc, name)
    if table is None:
        return None
    block = {}
    for key, rows in table.items():
        if name in ("j", "nu"):
            if key not in g.objects:
                raise DocumentError(f"{name}[{key}] names an unknown object.")
            cols = 1 if name == "j" else _dims(doc, g.identity(key).id)
        else:
            if not g.has_morphism(key):
                raise DocumentError(f"{name}[{key}] names an unknown morphism.")
            inverse = g.inverse(key).id
            cols = 1 if name == "coev" else _dims(doc, key) * _dims(doc, inverse)
        block[key] = _matrix(rows, doc.field, cols, f"{name}[{key}]")
    return block


def load_groupoid(path: PathLike) -> Groupoid:
    """
    Reads a groupoid document.

    Raises:
        DocumentError: If the file is not a well-formed groupoid.
    """
    groupoid = _parse(Groupoid, _read(path), str(path))
    logger.debug(
        "Loaded groupoid with %d objects and %d morphisms from %s.",
        len(groupoid.objects),
        len(groupoid.morphisms),
        path,
    )
    return groupoid


def category_from_document(doc: CategoryDocument, groupoid: Groupoid) -> CategoryLike:
    """
    Builds the category a document describes: a `CrossedFrobData` when it
    carries crossings, a `GVCategory` otherwise.

    Raises:
        DocumentError: If an id is unknown or a block is malformed.
    """
    try:
        base = GVCategory(
            groupoid=groupoid,
            grading=doc.grading,
            field=doc.field,
            dims=doc.dims,
            m=_pair_block(doc, "m", groupoid),
            j=_single_block(doc, "j", groupoid),
            delta=_pair_block(doc, "delta", groupoid),
            nu=_single_block(doc, "nu", groupoid),
            eta=_single_block(doc, "eta", groupoid),
            coev=_single_block(doc, "coev", groupoid),
        )
        if doc.phi is None:
            return base
        return CrossedFrobData(base=base, phi=_pair_block(doc, "phi", groupoid))
    except ValidationError as exc:
        raise DocumentError(f"The category is malformed:\n{exc}") from exc
    except (KeyError, LookupError) as exc:
        raise DocumentError(f"The category names an unknown id: {exc}") from exc


def load_category(path: PathLike, groupoid: Groupoid) -> CategoryLike:
    """
    Reads a category document over a groupoid.

    Raises:
        DocumentError: If the file is not a well-formed category.
    """
    doc = _parse(CategoryDocument, _read(path), str(path))
    return category_from_document(doc, groupoid)


def load_crossed(path: PathLike, groupoid: Groupoid) -> CrossedFrobData:
    """
    Reads a category document that must carry crossings.

    Raises:
        DocumentError: If the file is malformed or has no crossings.
    """
    category = load_category(path, groupoid)
    if not isinstance(category, CrossedFrobData):
        raise DocumentError(f"{path} has no 'phi' block to read crossings from.")
    return category


def load_rep(path: PathLike, groupoid: Groupoid) -> DualizableRep:
    """
    Reads a representation document over a groupoid.

    Raises:
        DocumentError: If the file is not a well-formed representation.
    """
    doc = _parse(RepDocument, _read(path), str(path))
    mats = {}
    for key, rows in doc.mats.items():
        if not groupoid.has_morphism(key):
            raise DocumentError(f"mats[{key}] names an unknown morphism.")
        src = groupoid.morphism(key).src
        mats[key] = _matrix(rows, doc.field, _dims(doc, src), f"mats[{key}]")
    try:
        return DualizableRep(
            groupoid=groupoid, field=doc.field, dims=doc.dims, mats=mats
        )
    except ValidationError as exc:
        raise DocumentError(f"The representation is malformed:\n{exc}") from exc


def _rows(block, separator: Optional[str] = None):
    if block is None:
        return None
    return {
        (separator.join(key) if separator else key): matrix.to_rows()
        for key, matrix in block.items()
    }


def category_document(category: CategoryLike) -> CategoryDocument:
    """The document form of a category."""
    if isinstance(category, CrossedFrobData):
        base, phi = category.base, _rows(category.phi, "|")
    else:
        base, phi = category, None
    return CategoryDocument(
        field=base.field,
        grading=base.grading,
        dims=base.dims,
        m=_rows(base.m, ","),
        j=_rows(base.j),
        delta=_rows(base.delta, ","),
        nu=_rows(base.nu),
        eta=_rows(base.eta),
        coev=_rows(base.coev),
        phi=phi,
    )


def dump_groupoid(groupoid: Groupoid) -> str:
    """The JSON text of a groupoid document."""
    return groupoid.json(by_alias=True, exclude_none=True, indent=2)


def dump_category(category: CategoryLike) -> str:
    """The JSON text of a category document."""
    doc = category_document(category)
    return doc.json(exclude_none=True, indent=2, sort_keys=True)


def dump_rep(rep: DualizableRep) -> str:
    """The JSON text of a representation document."""
    doc = RepDocument(field=rep.field, dims=rep.dims, mats=_rows(rep.mats))
    return doc.json(indent=2, sort_keys=True)


def write_document(path: PathLike, text: str) -> Path:
    """Writes document text, creating parent directories as needed."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text + "\n")
    logger.debug("Wrote %d bytes to %s.", len(text) + 1, target)
    return target

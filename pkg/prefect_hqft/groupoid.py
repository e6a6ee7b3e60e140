"""
Finite groupoids given by composition tables.

Composition is diagrammatic: for `α: x -> y` and `β: y -> z` the composite
`compose(α, β)` is "α, then β" and runs `x -> z`. Conjugation of a loop
`α` at `x` by a morphism `β: y -> x` is `β α β⁻¹`, a loop at `y`.
"""

from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from prefect.logging import get_logger
from pydantic import VERSION as PYDANTIC_VERSION
from sympy.combinatorics import Permutation
from sympy.combinatorics.named_groups import SymmetricGroup

if PYDANTIC_VERSION.startswith("2."):
    from pydantic.v1 import BaseModel, Field, PrivateAttr, root_validator
else:
    from pydantic import BaseModel, Field, PrivateAttr, root_validator

from prefect_hqft.reports import Report, ReportEntry

logger = get_logger("hqft.groupoid")


class UnknownMorphismError(KeyError):
    """A morphism id is not part of the groupoid"""


class UnknownObjectError(KeyError):
    """An object id is not part of the groupoid"""


class NotComposableError(ValueError):
    """The target of the first morphism is not the source of the second"""


class NotALoopError(ValueError):
    """A morphism required to be a loop has different endpoints"""


class MissingEntryError(LookupError):
    """The composition table has no entry for a composable pair"""


class InvalidGroupoidError(ValueError):
    """The groupoid violates one of the groupoid laws"""


@dataclass(frozen=True)
class MorRef:
    """A morphism handle: its id and endpoints."""

    id: str
    src: str
    tgt: str

    @property
    def is_loop(self) -> bool:
        """Whether source and target agree."""
        return self.src == self.tgt

    def __str__(self) -> str:
        return self.id


Morphism = Union[MorRef, str]


class MorphismSpec(BaseModel):
    """A morphism declaration in a groupoid document."""

    id: str = Field(..., description="Unique morphism id.")
    src: str = Field(..., description="Source object.")
    tgt: str = Field(..., description="Target object.")


class Groupoid(BaseModel):
    """
    A finite groupoid given by objects, morphisms and a composition table.

    Only referential integrity is enforced on construction; the groupoid
    laws are checked by `validate_laws`, which reports every violation.

    Args:
        objects: Object ids.
        morphisms: Morphism declarations.
        compose: Triples `(f, g, h)` meaning "f, then g" equals `h`.
        identities: The identity morphism of each object.
        inverses: Optional inverse table; derived from the composition
            table when absent.

    Examples:
        Build the cyclic group of order three and conjugate in it:
        ```python
        from prefect_hqft.groupoid import cyclic_group

        z3 = cyclic_group(3)
        assert z3.compose("a", "a2").id == "e"
        assert z3.conjugate("a", "a2").id == "a"
        ```
    """

    objects: List[str] = Field(..., description="Object ids.")
    morphisms: List[MorphismSpec] = Field(..., description="Morphism declarations.")
    compose_table: List[Tuple[str, str, str]] = Field(
        ..., alias="compose", description="Triples (f, g, f-then-g)."
    )
    identities: Dict[str, str] = Field(..., description="Identity of each object.")
    inverses: Optional[Dict[str, str]] = Field(
        default=None, description="Inverse of each morphism."
    )

    _refs: Dict[str, MorRef] = PrivateAttr(default_factory=dict)
    _table: Dict[Tuple[str, str], str] = PrivateAttr(default_factory=dict)
    _inverse: Dict[str, str] = PrivateAttr(default_factory=dict)

    class Config:
        allow_mutation = False
        allow_population_by_field_name = True
        copy_on_model_validation = "none"

    @root_validator(skip_on_failure=True)
    def _validate_references(cls, values):
        """
        Checks that every id used is declared exactly once.
        """
        objects = values["objects"]
        if len(set(objects)) != len(objects):
            raise ValueError("Object ids must be unique.")
        ids = [declared.id for declared in values["morphisms"]]
        if len(set(ids)) != len(ids):
            raise ValueError("Morphism ids must be unique.")
        known = {declared.id: declared for declared in values["morphisms"]}
        for declared in values["morphisms"]:
            if declared.src not in objects or declared.tgt not in objects:
                raise ValueError(
                    f"Morphism '{declared.id}' runs between undeclared objects "
                    f"'{declared.src}' and '{declared.tgt}'."
                )
        for obj in objects:
            unit = values["identities"].get(obj)
            if unit is None:
                raise ValueError(f"Object '{obj}' has no identity morphism.")
            if unit not in known or known[unit].src != obj or known[unit].tgt != obj:
                raise ValueError(f"Identity '{unit}' of '{obj}' is not a loop at it.")
        seen: Dict[Tuple[str, str], str] = {}
        for f, g, h in values["compose_table"]:
            for name in (f, g, h):
                if name not in known:
                    raise ValueError(f"Composition table names unknown id '{name}'.")
            if known[f].tgt != known[g].src:
                raise ValueError(f"Composition table composes '{f}' with '{g}'.")
            if seen.setdefault((f, g), h) != h:
                raise ValueError(f"Composition table has two results for '{f};{g}'.")
        for f, g in (values.get("inverses") or {}).items():
            if f not in known or g not in known:
                raise ValueError(f"Inverse table names unknown ids '{f}', '{g}'.")
        return values

    def __init__(self, **data):
        super().__init__(**data)
        self._refs = {
            declared.id: MorRef(declared.id, declared.src, declared.tgt)
            for declared in self.morphisms
        }
        self._table = {(f, g): h for f, g, h in self.compose_table}
        if self.inverses is not None:
            self._inverse = dict(self.inverses)
        else:
            self._inverse = self._derive_inverses()

    def _derive_inverses(self) -> Dict[str, str]:
        inverse = {}
        for (f, g), h in self._table.items():
            if h == self.identities[self._refs[f].src]:
                if self._table.get((g, f)) == self.identities[self._refs[f].tgt]:
                    inverse.setdefault(f, g)
        return inverse

    def morphism(self, morphism: Morphism) -> MorRef:
        """
        Resolves an id (or handle) to its handle.

        Raises:
            UnknownMorphismError: If the id is not declared.
        """
        key = morphism.id if isinstance(morphism, MorRef) else morphism
        try:
            return self._refs[key]
        except KeyError:
            raise UnknownMorphismError(f"Unknown morphism id '{key}'.") from None

    def has_morphism(self, morphism_id: str) -> bool:
        """Whether the id is declared."""
        return morphism_id in self._refs

    def refs(self) -> List[MorRef]:
        """All morphisms in declaration order."""
        return [self._refs[declared.id] for declared in self.morphisms]

    def identity(self, obj: str) -> MorRef:
        """
        The identity loop at an object.

        Raises:
            UnknownObjectError: If the object is not declared.
        """
        if obj not in self.identities:
            raise UnknownObjectError(f"Unknown object id '{obj}'.")
        return self._refs[self.identities[obj]]

    def is_identity(self, morphism: Morphism) -> bool:
        """Whether the morphism is the identity of its source."""
        ref = self.morphism(morphism)
        return self.identities[ref.src] == ref.id

    def compose(self, first: Morphism, second: Morphism) -> MorRef:
        """
        "first, then second".

        Raises:
            NotComposableError: If the target of `first` is not the source of
                `second`.
            MissingEntryError: If the table lacks the entry.
        """
        f, g = self.morphism(first), self.morphism(second)
        if f.tgt != g.src:
            raise NotComposableError(
                f"Cannot compose '{f.id}: {f.src} -> {f.tgt}' with "
                f"'{g.id}: {g.src} -> {g.tgt}'."
            )
        try:
            return self._refs[self._table[(f.id, g.id)]]
        except KeyError:
            raise MissingEntryError(
                f"The composition table has no entry for '{f.id};{g.id}'."
            ) from None

    def compose_path(self, *morphisms: Morphism) -> MorRef:
        """Composes a nonempty path left to right."""
        if not morphisms:
            raise ValueError("compose_path needs at least one morphism.")
        result = self.morphism(morphisms[0])
        for following in morphisms[1:]:
            result = self.compose(result, following)
        return result

    def inverse(self, morphism: Morphism) -> MorRef:
        """
        Raises:
            MissingEntryError: If the morphism has no inverse in the table.
        """
        ref = self.morphism(morphism)
        try:
            return self._refs[self._inverse[ref.id]]
        except KeyError:
            raise MissingEntryError(f"Morphism '{ref.id}' has no inverse.") from None

    def power(self, morphism: Morphism, sign: int) -> MorRef:
        """`morphism` for a positive sign, its inverse for a negative one."""
        return self.morphism(morphism) if sign > 0 else self.inverse(morphism)

    def conjugate(self, loop: Morphism, path: Morphism) -> MorRef:
        """
        `path loop path⁻¹` for a loop at `x` and a path `y -> x`.

        Raises:
            NotALoopError: If `loop` is not a loop.
            NotComposableError: If `path` does not end at the loop's base.
        """
        alpha, beta = self.morphism(loop), self.morphism(path)
        if not alpha.is_loop:
            raise NotALoopError(f"'{alpha.id}' is not a loop.")
        if beta.tgt != alpha.src:
            raise NotComposableError(
                f"Cannot conjugate the loop '{alpha.id}' at '{alpha.src}' by "
                f"'{beta.id}: {beta.src} -> {beta.tgt}'."
            )
        return self.compose_path(beta, alpha, self.inverse(beta))

    def commutator(self, first: Morphism, second: Morphism) -> MorRef:
        """`a b a⁻¹ b⁻¹` for two loops at the same object."""
        a, b = self.morphism(first), self.morphism(second)
        return self.compose_path(a, b, self.inverse(a), self.inverse(b))

    def loops_at(self, obj: str) -> List[MorRef]:
        """
        Loops at an object in declaration order.

        Raises:
            UnknownObjectError: If the object is not declared.
        """
        if obj not in self.identities:
            raise UnknownObjectError(f"Unknown object id '{obj}'.")
        return [ref for ref in self.refs() if ref.src == obj and ref.tgt == obj]

    def loops(self) -> List[MorRef]:
        """All loops in declaration order."""
        return [ref for ref in self.refs() if ref.is_loop]

    def paths_to(self, obj: str) -> List[MorRef]:
        """All morphisms ending at an object."""
        return [ref for ref in self.refs() if ref.tgt == obj]

    def homset(self, src: str, tgt: str) -> List[MorRef]:
        """All morphisms `src -> tgt`."""
        return [ref for ref in self.refs() if ref.src == src and ref.tgt == tgt]

    def composable_pairs(self) -> List[Tuple[MorRef, MorRef]]:
        """Every pair `(f, g)` with `tgt(f) == src(g)`."""
        refs = self.refs()
        return [(f, g) for f, g in product(refs, refs) if f.tgt == g.src]

    def validate_laws(self) -> Report:
        """
        Checks the groupoid laws, one report entry per instance.

        Checks: closure of the table over composable pairs, endpoints of
        composites, associativity, identity laws and inverse laws.
        """
        entries = []
        for f, g in self.composable_pairs():
            instance = (f.id, g.id)
            h = self._table.get(instance)
            entries.append(
                ReportEntry.verdict(
                    "groupoid.closure",
                    instance,
                    h is not None,
                    f"No entry for '{f.id};{g.id}'.",
                )
            )
            if h is not None:
                ref = self._refs[h]
                entries.append(
                    ReportEntry.verdict(
                        "groupoid.endpoints",
                        instance,
                        ref.src == f.src and ref.tgt == g.tgt,
                        f"'{f.id};{g.id}' = '{h}' runs {ref.src} -> {ref.tgt}, "
                        f"expected {f.src} -> {g.tgt}.",
                    )
                )
        for f, g in self.composable_pairs():
            for h in self.refs():
                if h.src != g.tgt:
                    continue
                instance = (f.id, g.id, h.id)
                left = self._lookup(self._lookup(f.id, g.id), h.id)
                right = self._lookup(f.id, self._lookup(g.id, h.id))
                entries.append(
                    ReportEntry.verdict(
                        "groupoid.associativity",
                        instance,
                        left is not None and left == right,
                        f"({f.id};{g.id});{h.id} = {left} but "
                        f"{f.id};({g.id};{h.id}) = {right}.",
                    )
                )
        for f in self.refs():
            left = self._lookup(self.identities[f.src], f.id)
            right = self._lookup(f.id, self.identities[f.tgt])
            entries.append(
                ReportEntry.verdict(
                    "groupoid.left_identity",
                    (f.id,),
                    left == f.id,
                    f"1_{f.src};{f.id} = {left}.",
                )
            )
            entries.append(
                ReportEntry.verdict(
                    "groupoid.right_identity",
                    (f.id,),
                    right == f.id,
                    f"{f.id};1_{f.tgt} = {right}.",
                )
            )
            g = self._inverse.get(f.id)
            entries.append(
                ReportEntry.verdict(
                    "groupoid.inverse",
                    (f.id,),
                    g is not None
                    and self._lookup(f.id, g) == self.identities[f.src]
                    and self._lookup(g, f.id) == self.identities[f.tgt],
                    f"'{f.id}' has no two-sided inverse (candidate {g}).",
                )
            )
        report = Report(name="groupoid", entries=entries)
        logger.debug(
            "Checked %d groupoid law instances, %d failed.",
            len(report.entries),
            len(report.failures()),
        )
        return report

    def _lookup(self, f: Optional[str], g: Optional[str]) -> Optional[str]:
        if f is None or g is None:
            return None
        return self._table.get((f, g))

    def require_valid(self) -> "Groupoid":
        """
        Returns self if every groupoid law holds.

        Raises:
            InvalidGroupoidError: Listing the first violations otherwise.
        """
        report = self.validate_laws()
        if not report.passed:
            failures = report.failures()
            shown = "; ".join(entry.describe() for entry in failures[:3])
            raise InvalidGroupoidError(
                f"The groupoid violates {len(failures)} law instance(s): {shown}"
            )
        return self


def from_group_table(
    elements: Sequence[str],
    product_of: Callable[[str, str], str],
    unit: str,
    obj: str = "x",
) -> Groupoid:
    """
    A one-object groupoid from a group given by its multiplication.

    Args:
        elements: Element ids.
        product_of: `product_of(g, h)` is "g, then h".
        unit: The identity element.
        obj: The object id.
    """
    return Groupoid(
        objects=[obj],
        morphisms=[MorphismSpec(id=g, src=obj, tgt=obj) for g in elements],
        compose=[(g, h, product_of(g, h)) for g in elements for h in elements],
        identities={obj: unit},
    )


def _cyclic_id(k: int) -> str:
    if k == 0:
        return "e"
    return "a" if k == 1 else f"a{k}"


def cyclic_group(n: int, obj: str = "x") -> Groupoid:
    """
    The cyclic group of order `n` with elements `e, a, a2, ...`.
    """
    if n < 1:
        raise ValueError("A cyclic group needs a positive order.")
    elements = [_cyclic_id(k) for k in range(n)]
    index = {name: k for k, name in enumerate(elements)}
    return from_group_table(
        elements, lambda g, h: elements[(index[g] + index[h]) % n], "e", obj
    )


def trivial_group(obj: str = "x") -> Groupoid:
    """The one-object, one-morphism groupoid."""
    return cyclic_group(1, obj)


def permutation_id(permutation: Permutation) -> str:
    """
    Id of a permutation: `e` for the identity, otherwise `p` followed by its
    cycles, e.g. `p01`, `p012`, `p01_23`.
    """
    if permutation.is_Identity:
        return "e"
    cycles = permutation.cyclic_form
    return "p" + "_".join("".join(str(point) for point in cycle) for cycle in cycles)


def symmetric_group_elements(n: int) -> Dict[str, Permutation]:
    """The permutations of `{0, ..., n-1}` keyed by `permutation_id`."""
    elements = {permutation_id(p): p for p in SymmetricGroup(n).generate()}
    return dict(sorted(elements.items(), key=lambda item: (item[0] != "e", item[0])))


def symmetric_group(n: int, obj: str = "x") -> Groupoid:
    """
    The symmetric group on `n` points; `compose(p, q)` applies `p` first.
    """
    elements = symmetric_group_elements(n)
    return from_group_table(
        list(elements),
        lambda g, h: permutation_id(elements[g] * elements[h]),
        "e",
        obj,
    )


def codiscrete_product(group: Groupoid, objects: Sequence[str]) -> Groupoid:
    """
    The product of a one-object groupoid with the codiscrete groupoid on
    `objects`. The morphism `(g, s, t)` has id `{g}_{s}{t}`.

    Raises:
        ValueError: If `group` has more than one object.
    """
    if len(group.objects) != 1:
        raise ValueError("codiscrete_product needs a one-object groupoid.")
    (base,) = group.objects
    elements = [ref.id for ref in group.loops_at(base)]
    unit = group.identities[base]

    def name(g: str, s: str, t: str) -> str:
        return f"{g}_{s}{t}"

    morphisms, table = [], []
    for g, s, t in product(elements, objects, objects):
        morphisms.append(MorphismSpec(id=name(g, s, t), src=s, tgt=t))
    for g, h in product(elements, elements):
        gh = group.compose(g, h).id
        for s, t, u in product(objects, objects, objects):
            table.append((name(g, s, t), name(h, t, u), name(gh, s, u)))
    return Groupoid(
        objects=list(objects),
        morphisms=morphisms,
        compose=table,
        identities={x: name(unit, x, x) for x in objects},
    )


def pair_groupoid(objects: Sequence[str]) -> Groupoid:
    """Exactly one morphism between any two objects."""
    return codiscrete_product(trivial_group(), objects)


def disjoint_union(
    left: Groupoid, right: Groupoid, prefixes: Tuple[str, str] = ("l", "r")
) -> Groupoid:
    """
    The disjoint union; ids of both objects and morphisms get prefixed as
    `{prefix}_{id}`.
    """
    objects, morphisms, table, identities = [], [], [], {}
    for prefix, part in zip(prefixes, (left, right)):

        def rename(name: str, prefix: str = prefix) -> str:
            return f"{prefix}_{name}"

        objects.extend(rename(x) for x in part.objects)
        morphisms.extend(
            MorphismSpec(id=rename(ref.id), src=rename(ref.src), tgt=rename(ref.tgt))
            for ref in part.refs()
        )
        table.extend(
            (rename(f), rename(g), rename(h)) for f, g, h in part.compose_table
        )
        identities.update(
            {rename(x): rename(unit) for x, unit in part.identities.items()}
        )
    return Groupoid(
        objects=objects, morphisms=morphisms, compose=table, identities=identities
    )

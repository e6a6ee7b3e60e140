"""
Evaluation of surface expressions on a crossed Frobenius category, and the
library of surface identities the evaluation must respect.
"""

import random
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from prefect.logging import get_logger

from prefect_hqft import surface as sf
from prefect_hqft.exactlin import ExactMatrix, compose, identity, permutation, symmetry
from prefect_hqft.exactlin import tensor as mtensor
from prefect_hqft.groupoid import Groupoid, MorRef
from prefect_hqft.gvcat import CrossedFrobData, partial_trace
from prefect_hqft.reports import Report, ReportEntry

logger = get_logger("hqft.evaluator")

DEFAULT_TRIALS = 256


def eval_generator(gen: sf.Generator, cfd: CrossedFrobData) -> ExactMatrix:
    """
    The matrix of a single generator.

    Raises:
        SurfaceTypeError: If the generator's labels are inconsistent.
        MissingStructureError: If a structure map it needs is absent.
    """
    g, cat = cfd.groupoid, cfd.base
    if isinstance(gen, sf.Cap):
        sf.typecheck(gen, g)
        return cat.unit(gen.obj) if gen.sign == "+" else cat.counit(gen.obj)
    if isinstance(gen, sf.Cylinder):
        return _eval_cylinder(gen, cfd)
    if isinstance(gen, sf.Disc):
        if gen.is_canonical:
            return _eval_canonical_disc(gen, cfd)
        return _eval_rotated_disc(gen, cfd)
    if isinstance(gen, sf.Identity):
        loops, _ = sf.typecheck(gen, g)
        return identity(_product(cat.dim(ref) for ref in loops), cfd.field)
    if isinstance(gen, sf.Swap):
        (first, second), _ = sf.typecheck(gen, g)
        return symmetry(cat.dim(first), cat.dim(second), cfd.field)
    raise TypeError(f"Not a generator: {gen!r}")


def _product(values: Iterable[int]) -> int:
    result = 1
    for value in values:
        result *= value
    return result


def _eval_cylinder(cyl: sf.Cylinder, cfd: CrossedFrobData) -> ExactMatrix:
    g, cat, phi = cfd.groupoid, cfd.base, cfd.crossing
    a, _ = sf.cylinder_labels(cyl, g)
    b = g.morphism(cyl.path)
    ai = g.inverse(a)
    pattern = cyl.eps + cyl.mu
    if pattern == "-+":
        return phi(a, b)
    if pattern == "--":
        return cat.pairing(g.conjugate(a, b)) @ mtensor(
            phi(a, b), cat.ident(g.conjugate(ai, b))
        )
    if pattern == "++":
        return mtensor(phi(ai, b), cat.ident(a)) @ cat.copairing(a)
    return phi(g.conjugate(a, b), g.inverse(b))


def _eval_canonical_disc(disc: sf.Disc, cfd: CrossedFrobData) -> ExactMatrix:
    g, cat, phi = cfd.groupoid, cfd.base, cfd.crossing
    a, b, gamma = sf.disc_labels(disc, g)
    rho, delta = g.morphism(disc.rho), g.morphism(disc.delta)
    ca, cb = g.conjugate(a, rho), g.conjugate(b, delta)
    if disc.pattern == "--+":
        return cat.mult(ca, cb) @ mtensor(phi(a, rho), phi(b, delta))
    if disc.pattern == "---":
        return (
            cat.pairing(g.inverse(gamma))
            @ mtensor(cat.mult(ca, cb), cat.ident(gamma))
            @ mtensor(phi(a, rho), phi(b, delta), cat.ident(gamma))
        )
    pull_back = mtensor(phi(cb, g.inverse(delta)), phi(ca, g.inverse(rho)))
    if disc.pattern == "++-":
        return pull_back @ cat.comult(cb, ca)
    return (
        mtensor(pull_back, cat.ident(gamma))
        @ mtensor(cat.comult(cb, ca), cat.ident(gamma))
        @ cat.copairing(gamma)
    )


def rotations_to_canonical(disc: sf.Disc) -> int:
    """How many rotations turn the disc's sign pattern canonical."""
    pattern = disc.pattern
    for k in range(3):
        if pattern[k:] + pattern[:k] in sf.CANONICAL_DISC_PATTERNS:
            return k
    raise ValueError(f"No rotation of '{pattern}' is canonical.")  # pragma: no cover


def rotation_permutations(
    disc: sf.Disc, rotations: int, cfd: CrossedFrobData
) -> Tuple[sf.Disc, ExactMatrix, ExactMatrix]:
    """
    Relates a disc to its `rotations`-fold rotation `r`:
    `Z(disc) = P_out Z(r) P_in`.

    Role `i` of `r` is role `(i + rotations) % 3` of `disc`; `P_in` reorders
    the incoming circles of `disc` into those of `r` and `P_out` reorders the
    outgoing circles of `r` into those of `disc`.

    Returns:
        The rotated disc, `P_in` and `P_out`.
    """
    g = cfd.groupoid
    labels = sf.disc_labels(disc, g)
    dims = [cfd.base.dim(ref) for ref in labels]
    rotated = disc
    for _ in range(rotations):
        rotated = sf.rotate_disc(rotated, g)

    def roles(pattern: str, order: Sequence[int], sign: str, shift: int) -> List[int]:
        return [(i + shift) % 3 for i in order if pattern[i] == sign]

    own_in = roles(disc.pattern, sf.DISC_INPUT_ORDER, "-", 0)
    rotated_in = roles(rotated.pattern, sf.DISC_INPUT_ORDER, "-", rotations)
    own_out = roles(disc.pattern, sf.DISC_OUTPUT_ORDER, "+", 0)
    rotated_out = roles(rotated.pattern, sf.DISC_OUTPUT_ORDER, "+", rotations)
    p_in = permutation(
        [dims[role] for role in own_in],
        [own_in.index(role) for role in rotated_in],
        cfd.field,
    )
    p_out = permutation(
        [dims[role] for role in rotated_out],
        [rotated_out.index(role) for role in own_out],
        cfd.field,
    )
    return rotated, p_in, p_out


def _eval_rotated_disc(disc: sf.Disc, cfd: CrossedFrobData) -> ExactMatrix:
    rotated, p_in, p_out = rotation_permutations(
        disc, rotations_to_canonical(disc), cfd
    )
    return p_out @ _eval_canonical_disc(rotated, cfd) @ p_in


def evaluate(expr: sf.SurfaceExpr, cfd: CrossedFrobData) -> ExactMatrix:
    """
    The matrix of a surface expression: gluing composes, placing side by
    side tensors.

    Raises:
        SurfaceTypeError: If the expression does not typecheck.
        MissingStructureError: If a structure map it needs is absent.

    Examples:
        The sphere over the groupoid algebra of a group evaluates to 1:
        ```python
        from prefect_hqft.evaluator import evaluate
        from prefect_hqft.groupoid import cyclic_group
        from prefect_hqft.gvcat import groupoid_algebra
        from prefect_hqft.surface import parse

        z2 = groupoid_algebra(cyclic_group(2))
        assert evaluate(parse("B+(x) ; B-(x)"), z2).scalar() == 1
        ```
    """
    sf.typecheck(expr, cfd.groupoid)
    return _evaluate(expr, cfd)


def _evaluate(expr: sf.SurfaceExpr, cfd: CrossedFrobData) -> ExactMatrix:
    if isinstance(expr, sf.Glue):
        return compose(_evaluate(expr.left, cfd), _evaluate(expr.right, cfd))
    if isinstance(expr, sf.Tensor):
        return mtensor(_evaluate(expr.left, cfd), _evaluate(expr.right, cfd))
    return eval_generator(expr, cfd)


Side = Union[sf.SurfaceExpr, ExactMatrix]
Instance = Tuple[MorRef, ...]


@dataclass(frozen=True)
class MoveFamily:
    """
    A family of surface identities: the label tuples it applies to, and for
    each tuple the pairs of sides that must evaluate equally, keyed by a
    variant name.
    """

    name: str
    instances: Callable[[Groupoid], List[Instance]]
    sides: Callable[[Groupoid, CrossedFrobData, Instance], Dict[str, Tuple[Side, Side]]]


def _loops_with_paths(g: Groupoid) -> List[Instance]:
    return [(a, b) for a in g.loops() for b in g.paths_to(a.src)]


def _loop_paths_paths(g: Groupoid) -> List[Instance]:
    return [(a, b, d) for a, b in _loops_with_paths(g) for d in g.paths_to(b.src)]


def _discs(g: Groupoid) -> List[Instance]:
    return [
        (a, b, rho, delta)
        for a, b in product(g.loops(), g.loops())
        for rho in g.paths_to(a.src)
        for delta in g.paths_to(b.src)
        if rho.src == delta.src
    ]


def _discs_with_path(g: Groupoid) -> List[Instance]:
    return [
        (a, b, rho, delta, xi)
        for a, b, rho, delta in _discs(g)
        for xi in g.paths_to(rho.src)
    ]


def _loop_pairs(g: Groupoid) -> List[Instance]:
    return [(a, b) for a in g.loops() for b in g.loops_at(a.src)]


def _loop_triples(g: Groupoid) -> List[Instance]:
    return [(a, b, c) for a, b in _loop_pairs(g) for c in g.loops_at(a.src)]


def _single_loops(g: Groupoid) -> List[Instance]:
    return [(a,) for a in g.loops()]


def _inner_gluings(g: Groupoid) -> List[Instance]:
    return [
        (a, xi, b, rho, delta)
        for a, xi in _loops_with_paths(g)
        for b in g.loops()
        for rho in g.paths_to(xi.src)
        for delta in g.paths_to(b.src)
        if rho.src == delta.src
    ]


def _canonical(eps: str, mu: str, nu: str, a, b, rho, delta) -> sf.Disc:
    return sf.Disc(eps, mu, nu, str(a), str(b), str(rho), str(delta))


def _dehn_twist(g, cfd, inst):
    a, b = inst
    ba = g.compose(b, a)
    return {
        eps + mu: (
            sf.Cylinder(eps, mu, a.id, ba.id),
            sf.Cylinder(eps, mu, a.id, b.id),
        )
        for eps, mu in product(sf.SIGNS, sf.SIGNS)
    }


def _cylinder_reflection(g, cfd, inst):
    a, b = inst
    a_dash, b_inverse = g.conjugate(g.inverse(a), b), g.inverse(b)
    return {
        "--": (
            sf.glue(
                sf.Swap(a.id, a_dash.id),
                sf.Cylinder("-", "-", a_dash.id, b_inverse.id),
            ),
            sf.Cylinder("-", "-", a.id, b.id),
        ),
        "++": (
            sf.glue(
                sf.Cylinder("+", "+", a_dash.id, b_inverse.id),
                sf.Swap(a.id, a_dash.id),
            ),
            sf.Cylinder("+", "+", a.id, b.id),
        ),
    }


def _disc_reflection(g, cfd, inst):
    a, b, rho, delta = inst
    sides = {}
    incoming = _canonical("-", "-", "-", a, b, rho, delta)
    gamma = sf.outer_label(incoming, g)
    sides["---"] = (
        sf.glue(
            sf.parallel(sf.Swap(a.id, b.id), sf.ids(gamma)),
            sf.parallel(sf.ids(b), sf.Swap(a.id, gamma.id)),
            sf.rotate_disc(incoming, g),
        ),
        incoming,
    )
    outgoing = _canonical("+", "+", "+", a, b, rho, delta)
    gamma = sf.outer_label(outgoing, g)
    sides["+++"] = (
        sf.glue(
            sf.rotate_disc(outgoing, g),
            sf.parallel(sf.Swap(gamma.id, b.id), sf.ids(a)),
            sf.parallel(sf.ids(b), sf.Swap(gamma.id, a.id)),
        ),
        outgoing,
    )
    return sides


def _cylinder_gluing(g, cfd, inst):
    a, b, delta = inst
    w, w_inverse = g.conjugate(a, b), g.conjugate(g.inverse(a), b)
    db = g.compose(delta, b)
    v = g.conjugate(w, delta)
    cyl = sf.Cylinder
    return {
        "-+": (
            sf.glue(cyl("-", "+", a.id, b.id), cyl("-", "+", w.id, delta.id)),
            cyl("-", "+", a.id, db.id),
        ),
        "--": (
            sf.glue(
                sf.parallel(
                    cyl("-", "+", a.id, b.id), sf.ids(g.conjugate(w_inverse, delta))
                ),
                cyl("-", "-", w.id, delta.id),
            ),
            cyl("-", "-", a.id, db.id),
        ),
        "++": (
            sf.glue(
                cyl("+", "+", a.id, b.id),
                sf.parallel(cyl("-", "+", w_inverse.id, delta.id), sf.ids(a)),
            ),
            cyl("+", "+", a.id, db.id),
        ),
        "+-": (
            sf.glue(
                sf.parallel(sf.ids(v), cyl("+", "+", a.id, b.id)),
                sf.parallel(sf.Swap(v.id, w_inverse.id), sf.ids(a)),
                sf.parallel(cyl("-", "-", w_inverse.id, delta.id), sf.ids(a)),
            ),
            cyl("+", "-", a.id, db.id),
        ),
    }


def _disc_gluing(g, cfd, inst):
    a, b, rho, delta, xi = inst
    xi_rho, xi_delta = g.compose(xi, rho), g.compose(xi, delta)
    cyl, sides = sf.Cylinder, {}

    disc = _canonical("-", "-", "-", a, b, rho, delta)
    gamma = sf.outer_label(disc, g)
    w = g.conjugate(g.inverse(gamma), xi)
    sides["---"] = (
        sf.glue(
            sf.parallel(sf.ids(a, b), cyl("+", "+", gamma.id, xi.id)),
            sf.parallel(sf.ids(a, b), sf.Swap(w.id, gamma.id)),
            sf.parallel(disc, sf.ids(w)),
        ),
        _canonical("-", "-", "+", a, b, xi_rho, xi_delta),
    )

    disc = _canonical("-", "-", "+", a, b, rho, delta)
    gamma = sf.outer_label(disc, g)
    w = g.conjugate(g.inverse(gamma), xi)
    sides["--+"] = (
        sf.glue(sf.parallel(disc, sf.ids(w)), cyl("-", "-", gamma.id, xi.id)),
        _canonical("-", "-", "-", a, b, xi_rho, xi_delta),
    )

    disc = _canonical("+", "+", "+", a, b, rho, delta)
    gamma = sf.outer_label(disc, g)
    w = g.conjugate(g.inverse(gamma), xi)
    sides["+++"] = (
        sf.glue(
            sf.parallel(sf.ids(w), disc),
            sf.parallel(sf.Swap(w.id, b.id), sf.ids(a, gamma)),
            sf.parallel(sf.ids(b), sf.Swap(w.id, a.id), sf.ids(gamma)),
            sf.parallel(sf.ids(b, a), sf.Swap(w.id, gamma.id)),
            sf.parallel(sf.ids(b, a), cyl("-", "-", gamma.id, xi.id)),
        ),
        _canonical("+", "+", "-", a, b, xi_rho, xi_delta),
    )

    disc = _canonical("+", "+", "-", a, b, rho, delta)
    gamma = sf.outer_label(disc, g)
    w = g.conjugate(g.inverse(gamma), xi)
    sides["++-"] = (
        sf.glue(
            cyl("+", "+", gamma.id, xi.id),
            sf.parallel(sf.ids(w), disc),
            sf.parallel(sf.Swap(w.id, b.id), sf.ids(a)),
            sf.parallel(sf.ids(b), sf.Swap(w.id, a.id)),
        ),
        _canonical("+", "+", "+", a, b, xi_rho, xi_delta),
    )
    return sides


def _inner_gluing(g, cfd, inst):
    a, xi, b, rho, delta = inst
    return {
        "--+": (
            sf.glue(
                sf.parallel(sf.Cylinder("-", "+", a.id, xi.id), sf.ids(b)),
                _canonical("-", "-", "+", g.conjugate(a, xi), b, rho, delta),
            ),
            _canonical("-", "-", "+", a, b, g.compose(rho, xi), delta),
        )
    }


def _inner_switch(g, cfd, inst):
    a, b = inst
    one, b_inverse = g.identity(a.src), g.inverse(b)
    return {
        "--+": (
            sf.glue(
                sf.Swap(a.id, b.id),
                sf.parallel(sf.ids(b), sf.Cylinder("-", "+", a.id, b_inverse.id)),
                _canonical("-", "-", "+", b, g.conjugate(a, b_inverse), one, one),
            ),
            _canonical("-", "-", "+", a, b, one, one),
        )
    }


def _associativity(g, cfd, inst):
    a, b, c = inst
    one = g.identity(a.src)

    def mult(x, y):
        return _canonical("-", "-", "+", x, y, one, one)

    return {
        "--+": (
            sf.glue(sf.parallel(mult(a, b), sf.ids(c)), mult(g.compose(a, b), c)),
            sf.glue(sf.parallel(sf.ids(a), mult(b, c)), mult(a, g.compose(b, c))),
        )
    }


def _disc_unit(g, cfd, inst):
    (a,) = inst
    x = a.src
    one = g.identity(x)
    return {
        "unit_left": (
            sf.glue(
                sf.parallel(sf.Cap("+", x), sf.ids(a)),
                _canonical("-", "-", "+", one, a, one, one),
            ),
            sf.ids(a),
        ),
        "unit_right": (
            sf.glue(
                sf.parallel(sf.ids(a), sf.Cap("+", x)),
                _canonical("-", "-", "+", a, one, one, one),
            ),
            sf.ids(a),
        ),
        "counit_left": (
            sf.glue(
                _canonical("+", "+", "-", a, one, one, one),
                sf.parallel(sf.Cap("-", x), sf.ids(a)),
            ),
            sf.ids(a),
        ),
        "counit_right": (
            sf.glue(
                _canonical("+", "+", "-", one, a, one, one),
                sf.parallel(sf.ids(a), sf.Cap("-", x)),
            ),
            sf.ids(a),
        ),
    }


def _frobenius(g, cfd, inst):
    a, b, c = inst
    one = g.identity(a.src)
    ab, bc = g.compose(a, b), g.compose(b, c)

    def mult(x, y):
        return _canonical("-", "-", "+", x, y, one, one)

    def comult(x, y):
        return _canonical("+", "+", "-", y, x, one, one)

    return {
        "left": (
            sf.glue(mult(ab, c), comult(a, bc)),
            sf.glue(
                sf.parallel(comult(a, b), sf.ids(c)),
                sf.parallel(sf.ids(a), mult(b, c)),
            ),
        ),
        "right": (
            sf.glue(mult(a, bc), comult(ab, c)),
            sf.glue(
                sf.parallel(sf.ids(a), comult(b, c)),
                sf.parallel(mult(a, b), sf.ids(c)),
            ),
        ),
    }


def _punctured_torus(g, cfd, inst):
    a, b = inst
    return {
        "cuts": (
            sf.punctured_torus(a.id, b.id, g, "alpha"),
            sf.punctured_torus(a.id, b.id, g, "beta"),
        )
    }


def _trace_lemma(g, cfd, inst):
    a, b = inst
    kappa, one = g.commutator(a, b), g.identity(a.src)
    inner = evaluate(_canonical("-", "-", "+", kappa, a, one, b), cfd)
    return {
        "trace": (
            sf.punctured_torus(a.id, b.id, g, "alpha"),
            partial_trace(cfd, kappa, a, inner),
        )
    }


def _dictionary(g, cfd, inst):
    a, b = inst
    cat = cfd.base
    x = a.src
    one = g.identity(x)
    sides = {
        "m": (_canonical("-", "-", "+", a, b, one, one), cat.mult(a, b)),
        "delta": (_canonical("+", "+", "-", b, a, one, one), cat.comult(a, b)),
        "phi": (sf.Cylinder("-", "+", a.id, b.id), cfd.crossing(a, b)),
    }
    if b == one:
        sides["eta"] = (sf.Cylinder("-", "-", a.id, one.id), cat.pairing(a))
        sides["coev"] = (sf.Cylinder("+", "+", a.id, one.id), cat.copairing(a))
        if a == one:
            sides["j"] = (sf.Cap("+", x), cat.unit(x))
            sides["nu"] = (sf.Cap("-", x), cat.counit(x))
    return sides


MOVE_FAMILIES: Tuple[MoveFamily, ...] = (
    MoveFamily("dehn_twist", _loops_with_paths, _dehn_twist),
    MoveFamily("cylinder_reflection", _loops_with_paths, _cylinder_reflection),
    MoveFamily("disc_reflection", _discs, _disc_reflection),
    MoveFamily("cylinder_gluing", _loop_paths_paths, _cylinder_gluing),
    MoveFamily("disc_gluing", _discs_with_path, _disc_gluing),
    MoveFamily("inner_gluing", _inner_gluings, _inner_gluing),
    MoveFamily("inner_switch", _loop_pairs, _inner_switch),
    MoveFamily("associativity", _loop_triples, _associativity),
    MoveFamily("disc_unit", _single_loops, _disc_unit),
    MoveFamily("frobenius", _loop_triples, _frobenius),
    MoveFamily("punctured_torus", _loop_pairs, _punctured_torus),
    MoveFamily("trace_lemma", _loop_pairs, _trace_lemma),
    MoveFamily("dictionary", _loop_pairs, _dictionary),
)

MOVE_NAMES = tuple(family.name for family in MOVE_FAMILIES)


def _sample(
    instances: List[Instance], trials: int, seed: int, name: str
) -> List[Instance]:
    if len(instances) <= trials:
        return instances
    rng = random.Random(f"{seed}:{name}")
    return [instances[k] for k in sorted(rng.sample(range(len(instances)), trials))]


def _value(side: Side, cfd: CrossedFrobData) -> ExactMatrix:
    return side if isinstance(side, ExactMatrix) else evaluate(side, cfd)


def check_moves(
    cfd: CrossedFrobData,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    families: Optional[Sequence[str]] = None,
) -> Report:
    """
    Checks that surfaces related by the standard moves evaluate equally.

    Every applicable label tuple is checked when a family has at most
    `trials` of them; otherwise `trials` tuples are sampled with a generator
    seeded from `seed` and the family name.

    Args:
        cfd: The crossed category.
        seed: The sampling seed, recorded in the report metadata.
        trials: The per-family instance cap.
        families: Names from `MOVE_NAMES`; all families when `None`.

    Raises:
        ValueError: For an unknown family name or a non-positive `trials`.
    """
    if trials < 1:
        raise ValueError("trials must be positive.")
    selected = list(MOVE_NAMES if families is None else families)
    unknown = sorted(set(selected) - set(MOVE_NAMES))
    if unknown:
        raise ValueError(f"Unknown move families {unknown}; known: {list(MOVE_NAMES)}.")
    g = cfd.groupoid
    entries: List[ReportEntry] = []
    for family in MOVE_FAMILIES:
        if family.name not in selected:
            continue
        instances = family.instances(g)
        chosen = _sample(instances, trials, seed, family.name)
        logger.debug(
            "Move family %s: checking %d of %d instances.",
            family.name,
            len(chosen),
            len(instances),
        )
        for inst in chosen:
            labels = tuple(ref.id for ref in inst)
            for variant, (lhs, rhs) in family.sides(g, cfd, inst).items():
                entries.append(
                    ReportEntry.compare(
                        f"moves.{family.name}",
                        (variant,) + labels,
                        _value(lhs, cfd),
                        _value(rhs, cfd),
                    )
                )
    report = Report(
        name="moves",
        entries=entries,
        metadata={"seed": seed, "trials": trials, "families": selected},
    )
    logger.info(
        "Checked %d move instances with seed %d; %d failed.",
        len(report.entries),
        seed,
        len(report.failures()),
    )
    return report

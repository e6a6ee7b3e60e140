"""Tasks and flows running verifications from document files."""

from pathlib import Path
from typing import List, Optional, Union

from prefect import flow, get_run_logger, task

from prefect_hqft.documents import (
    dump_category,
    load_category,
    load_crossed,
    load_groupoid,
    write_document,
)
from prefect_hqft.evaluator import DEFAULT_TRIALS, MOVE_NAMES, check_moves, evaluate
from prefect_hqft.exactlin import ExactMatrix
from prefect_hqft.gvcat import (
    CrossedFrobData,
    applicable_modes,
    check_axioms,
    check_crossing,
    derive_structure,
)
from prefect_hqft.reports import Report
from prefect_hqft.settings import VERIFY_CHECKS
from prefect_hqft.surface import parse

PathLike = Union[str, Path]


@task
def validate_groupoid_task(groupoid_path: PathLike) -> Report:
    """
    Checks the groupoid laws of a groupoid document.

    Args:
        groupoid_path: The groupoid document.

    Returns:
        The groupoid law report.

    Examples:
        ```python
        from prefect import flow
        from prefect_hqft.flows import validate_groupoid_task

        @flow
        def validate_groupoid_flow():
            report = validate_groupoid_task("z2.groupoid.json")
            return report.passed

        validate_groupoid_flow()
        ```
    """
    logger = get_run_logger()
    report = load_groupoid(groupoid_path).validate_laws()
    logger.info(report.headline())
    return report


@task
def check_axioms_task(
    groupoid_path: PathLike,
    category_path: PathLike,
    modes: Optional[List[str]] = None,
) -> Report:
    """
    Checks the axioms of a category document.

    Args:
        groupoid_path: The groupoid document.
        category_path: The category document.
        modes: Axiom modes to check; every applicable one when `None`.

    Returns:
        The axiom report.

    Examples:
        ```python
        from prefect import flow
        from prefect_hqft.flows import check_axioms_task

        @flow
        def check_frobenius_flow():
            return check_axioms_task(
                "z2.groupoid.json", "z2.category.json", modes=["frobenius"]
            )

        check_frobenius_flow()
        ```
    """
    logger = get_run_logger()
    category = load_category(category_path, load_groupoid(groupoid_path))
    report = check_axioms(category, modes)
    logger.info(report.headline())
    return report


@task
def check_crossing_task(groupoid_path: PathLike, category_path: PathLike) -> Report:
    """
    Checks the crossing axioms and their consequences.

    Args:
        groupoid_path: The groupoid document.
        category_path: A category document with a `phi` block.

    Returns:
        The crossing report.
    """
    logger = get_run_logger()
    category = load_crossed(category_path, load_groupoid(groupoid_path))
    report = check_crossing(category)
    logger.info(report.headline())
    return report


@task
def check_moves_task(
    groupoid_path: PathLike,
    category_path: PathLike,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    families: Optional[List[str]] = None,
) -> Report:
    """
    Checks that surfaces related by the standard moves evaluate equally.

    Args:
        groupoid_path: The groupoid document.
        category_path: A category document with a `phi` block.
        seed: The sampling seed.
        trials: The per-family instance cap.
        families: Move family names; all when `None`.

    Returns:
        The move report.
    """
    logger = get_run_logger()
    category = load_crossed(category_path, load_groupoid(groupoid_path))
    report = check_moves(category, seed=seed, trials=trials, families=families)
    logger.info(report.headline())
    return report


@task
def evaluate_task(
    groupoid_path: PathLike, category_path: PathLike, expression: str
) -> ExactMatrix:
    """
    Evaluates a surface expression.

    Args:
        groupoid_path: The groupoid document.
        category_path: A category document with a `phi` block.
        expression: The surface expression text.

    Returns:
        The linear map the surface evaluates to.

    Examples:
        ```python
        from prefect import flow
        from prefect_hqft.flows import evaluate_task

        @flow
        def sphere_flow():
            value = evaluate_task(
                "z2.groupoid.json", "z2.category.json", "B+(x) ; B-(x)"
            )
            return value.scalar()

        sphere_flow()
        ```
    """
    logger = get_run_logger()
    groupoid = load_groupoid(groupoid_path)
    category = load_crossed(category_path, groupoid)
    value = evaluate(parse(expression, groupoid), category)
    logger.info(f"Evaluated {expression!r} to a {value.rows}x{value.cols} matrix.")
    return value


@task
def derive_task(
    groupoid_path: PathLike,
    category_path: PathLike,
    direction: str,
    output_path: PathLike,
) -> Path:
    """
    Writes a copy of a category document with derived blocks added.

    Args:
        groupoid_path: The groupoid document.
        category_path: The category document.
        direction: `"eta"` or `"delta"`, see `derive_structure`.
        output_path: Where to write the completed document.

    Returns:
        The path written.
    """
    logger = get_run_logger()
    category = load_category(category_path, load_groupoid(groupoid_path))
    derived = derive_structure(category, direction)
    target = write_document(output_path, dump_category(derived))
    logger.info(f"Wrote the {direction}-derived category to {target}.")
    return target


@flow
def verify_flow(
    groupoid_path: PathLike,
    category_path: PathLike,
    checks: Optional[List[str]] = None,
) -> Report:
    """
    Runs the groupoid, axiom and crossing checks of a category document.

    The groupoid is checked first; its laws failing ends the run. Each axiom
    mode and the crossing checks are then submitted concurrently and merged
    into one report.

    Args:
        groupoid_path: The groupoid document.
        category_path: The category document.
        checks: Axiom modes and `crossing` to run; every applicable check
            when `None`. A requested mode whose blocks are absent fails the
            run.

    Returns:
        The merged report.

    Raises:
        ValueError: For a check that is neither an axiom mode nor `crossing`.

    Examples:
        ```python
        from prefect_hqft.flows import verify_flow

        report = verify_flow("z2.groupoid.json", "z2.category.json")
        print(report.summary())
        ```
    """
    logger = get_run_logger()
    unknown = [check for check in checks or () if check not in VERIFY_CHECKS]
    if unknown:
        raise ValueError(
            f"Unknown verify checks {unknown}; move families run in moves_flow."
        )
    groupoid_report = validate_groupoid_task(groupoid_path)
    if not groupoid_report.passed:
        logger.info(groupoid_report.headline())
        return groupoid_report

    if checks is None:
        category = load_category(category_path, load_groupoid(groupoid_path))
        selected = applicable_modes(category)
        if isinstance(category, CrossedFrobData):
            selected.append("crossing")
    else:
        selected = list(dict.fromkeys(checks))

    futures = [
        check_axioms_task.submit(groupoid_path, category_path, [mode])
        for mode in selected
        if mode != "crossing"
    ]
    if "crossing" in selected:
        futures.append(check_crossing_task.submit(groupoid_path, category_path))

    report = Report.merge(
        [groupoid_report] + [future.result() for future in futures],
        name="verify",
        metadata={"checks": selected},
    )
    logger.info(report.headline())
    return report


@flow
def moves_flow(
    groupoid_path: PathLike,
    category_path: PathLike,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    families: Optional[List[str]] = None,
) -> Report:
    """
    Checks the move families of a crossed category, one task per family.

    Args:
        groupoid_path: The groupoid document.
        category_path: A category document with a `phi` block.
        seed: The sampling seed.
        trials: The per-family instance cap.
        families: Move family names; all when `None`.

    Returns:
        The merged move report.
    """
    logger = get_run_logger()
    selected = list(MOVE_NAMES if families is None else families)
    unknown = sorted(set(selected) - set(MOVE_NAMES))
    if unknown:
        raise ValueError(f"Unknown move families {unknown}.")
    futures = [
        check_moves_task.submit(groupoid_path, category_path, seed, trials, [name])
        for name in selected
    ]
    report = Report.merge(
        [future.result() for future in futures],
        name="moves",
        metadata={"seed": seed, "trials": trials, "families": selected},
    )
    logger.info(report.headline())
    return report


@flow
def derive_flow(
    groupoid_path: PathLike,
    category_path: PathLike,
    direction: str,
    output_path: PathLike,
) -> Report:
    """
    Derives one Frobenius presentation from the other, writes the completed
    document and re-verifies it.

    Args:
        groupoid_path: The groupoid document.
        category_path: The category document.
        direction: `"eta"` or `"delta"`.
        output_path: Where to write the completed document.

    Returns:
        The verification report of the written document.
    """
    target = derive_task(groupoid_path, category_path, direction, output_path)
    return verify_flow(groupoid_path, target)

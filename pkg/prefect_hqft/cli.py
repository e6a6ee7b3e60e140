"""
The `prefect-hqft` command line.

Every command exits with 0 when all checks pass, 1 when the input was read
and a check failed, and 2 when the input is malformed.
"""

from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional

import click

from prefect_hqft.documents import (
    dump_category,
    load_category,
    load_groupoid,
    load_rep,
    write_document,
)
from prefect_hqft.evaluator import DEFAULT_TRIALS, MOVE_NAMES, check_moves, evaluate
from prefect_hqft.exactlin import RATIONALS, FieldSpec
from prefect_hqft.gvcat import (
    AXIOM_MODES,
    DERIVATIONS,
    CrossedFrobData,
    MissingStructureError,
    applicable_modes,
    check_axioms,
    check_crossing,
    derive_structure,
    groupoid_algebra,
    groupoid_algebra_category,
)
from prefect_hqft.onedim import (
    OneCobTypeError,
    evaluate_1d,
    line_signature_text,
    parse_1d,
    typecheck_1d,
)
from prefect_hqft.reports import Report
from prefect_hqft.settings import RunConfig, VerificationSettings
from prefect_hqft.surface import (
    SurfaceTypeError,
    format_signature,
    parse,
    typecheck,
)

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2

MALFORMED_INPUT_ERRORS = (
    ValueError,
    LookupError,
    OneCobTypeError,
    SurfaceTypeError,
)

_input_file = click.Path(exists=False, dir_okay=False, path_type=Path)


@contextmanager
def _malformed_input_exits():
    try:
        yield
    except MALFORMED_INPUT_ERRORS as exc:
        click.echo(f"Error: {exc}", err=True)
        raise SystemExit(EXIT_MALFORMED) from exc


def _split_checks(checks: Optional[str]) -> Optional[List[str]]:
    if checks is None:
        return None
    return [check.strip() for check in checks.split(",") if check.strip()]


def _run_config(command: str, settings: Optional[str], **flags) -> RunConfig:
    saved = VerificationSettings.load(settings) if settings else None
    return RunConfig.from_settings(command, saved, **flags)


def _finish(report: Report, config: RunConfig) -> None:
    click.echo(report.summary())
    click.echo(report.headline())
    if config.report is not None:
        write_document(config.report, report.to_json())
        click.echo(f"Report written to {config.report}")
    if not report.passed:
        raise SystemExit(EXIT_FAILED)


def _require_crossed(category, what: str) -> CrossedFrobData:
    if not isinstance(category, CrossedFrobData):
        raise MissingStructureError(f"{what} needs a category with a 'phi' block.")
    return category


def _verify_category(category, config: RunConfig) -> List[Report]:
    if config.checks is None:
        reports = [check_axioms(category, applicable_modes(category))]
        if isinstance(category, CrossedFrobData):
            reports.append(check_crossing(category))
        return reports
    reports = []
    modes = [check for check in config.checks if check in AXIOM_MODES]
    if modes:
        reports.append(check_axioms(category, modes))
    if "crossing" in config.checks:
        reports.append(check_crossing(_require_crossed(category, "crossing")))
    families = [check for check in config.checks if check in MOVE_NAMES]
    if families:
        crossed = _require_crossed(category, "Checking moves")
        reports.append(
            check_moves(
                crossed, seed=config.seed, trials=config.trials, families=families
            )
        )
    return reports


_groupoid_option = click.option(
    "--groupoid",
    "groupoid_path",
    required=True,
    type=_input_file,
    help="Groupoid document.",
)
_category_option = click.option(
    "--category",
    "category_path",
    required=True,
    type=_input_file,
    help="Category document.",
)
_report_option = click.option(
    "--report",
    "report_path",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the JSON report here.",
)
_settings_option = click.option(
    "--settings", help="Name of a saved VerificationSettings block."
)
_seed_option = click.option("--seed", type=int, help="Seed of sampled checks.")
_trials_option = click.option(
    "--trials", type=int, help=f"Instances per move family [{DEFAULT_TRIALS}]."
)


@click.group()
@click.version_option(package_name="prefect-hqft")
def cli():
    """Verify and evaluate crossed Frobenius categories."""


@cli.command("validate-groupoid")
@click.argument("groupoid_path", type=_input_file)
@_report_option
def validate_groupoid(groupoid_path: Path, report_path: Optional[Path]):
    """Check the groupoid laws of GROUPOID_PATH."""
    with _malformed_input_exits():
        config = RunConfig(
            command="validate-groupoid",
            inputs={"groupoid": groupoid_path},
            report=report_path,
        )
        report = load_groupoid(groupoid_path).validate_laws()
    _finish(report, config)


@cli.command()
@_groupoid_option
@_category_option
@click.option(
    "--checks",
    help="Comma-separated axiom modes, 'crossing' or move families.",
)
@_seed_option
@_trials_option
@_report_option
@_settings_option
def verify(
    groupoid_path: Path,
    category_path: Path,
    checks: Optional[str],
    seed: Optional[int],
    trials: Optional[int],
    report_path: Optional[Path],
    settings: Optional[str],
):
    """
    Check the groupoid laws, the axioms and the crossing of a category.
    """
    with _malformed_input_exits():
        config = _run_config(
            "verify",
            settings,
            inputs={"groupoid": groupoid_path, "category": category_path},
            checks=_split_checks(checks),
            seed=seed,
            trials=trials,
            report=report_path,
        )
        groupoid = load_groupoid(groupoid_path)
        reports = [groupoid.validate_laws()]
        if reports[0].passed:
            category = load_category(category_path, groupoid)
            reports.extend(_verify_category(category, config))
        report = Report.merge(
            reports,
            name="verify",
            metadata={"seed": config.seed, "trials": config.trials},
        )
    _finish(report, config)


@cli.command()
@_groupoid_option
@_category_option
@click.option("--checks", help="Comma-separated move families; all when unset.")
@_seed_option
@_trials_option
@_report_option
@_settings_option
def moves(
    groupoid_path: Path,
    category_path: Path,
    checks: Optional[str],
    seed: Optional[int],
    trials: Optional[int],
    report_path: Optional[Path],
    settings: Optional[str],
):
    """Check that surfaces related by the standard moves evaluate equally."""
    with _malformed_input_exits():
        config = _run_config(
            "moves",
            settings,
            inputs={"groupoid": groupoid_path, "category": category_path},
            checks=_split_checks(checks),
            seed=seed,
            trials=trials,
            report=report_path,
        )
        families = config.selected(list(MOVE_NAMES))
        if not families:
            raise click.UsageError(
                f"--checks selects no move family; known: {', '.join(MOVE_NAMES)}."
            )
        groupoid = load_groupoid(groupoid_path)
        category = _require_crossed(
            load_category(category_path, groupoid), "Checking moves"
        )
        report = check_moves(
            category, seed=config.seed, trials=config.trials, families=families
        )
    _finish(report, config)


def _evaluate_surface(groupoid_path: Path, category_path: Path, expression: str):
    groupoid = load_groupoid(groupoid_path)
    category = _require_crossed(
        load_category(category_path, groupoid), "Evaluating surfaces"
    )
    expr = parse(expression, groupoid)
    inputs, outputs = typecheck(expr, groupoid)
    signature = f"{format_signature(inputs)} -> {format_signature(outputs)}"
    return signature, evaluate(expr, category)


def _evaluate_line(groupoid_path: Path, rep_path: Path, expression: str):
    groupoid = load_groupoid(groupoid_path)
    rep = load_rep(rep_path, groupoid)
    expr = parse_1d(expression, groupoid)
    inputs, outputs = typecheck_1d(expr, groupoid)
    signature = f"{line_signature_text(inputs)} -> {line_signature_text(outputs)}"
    return signature, evaluate_1d(expr, rep)


@cli.command("eval")
@_groupoid_option
@click.option(
    "--category", "category_path", type=_input_file, help="Category document."
)
@click.option("--rep", "rep_path", type=_input_file, help="Representation document.")
@click.option("-e", "--expr", "expression", required=True, help="Expression text.")
@click.option(
    "--dim",
    type=click.Choice(["1", "2"]),
    default="2",
    show_default=True,
    help="Evaluate a surface (2) or a one-dimensional expression (1).",
)
def eval_command(
    groupoid_path: Path,
    category_path: Optional[Path],
    rep_path: Optional[Path],
    expression: str,
    dim: str,
):
    """Print the signature and the matrix an expression evaluates to."""
    if dim == "2" and category_path is None:
        raise click.UsageError("Surfaces need --category.")
    if dim == "1" and rep_path is None:
        raise click.UsageError("One-dimensional expressions need --rep.")
    with _malformed_input_exits():
        if dim == "2":
            signature, value = _evaluate_surface(
                groupoid_path, category_path, expression
            )
        else:
            signature, value = _evaluate_line(groupoid_path, rep_path, expression)
    click.echo(signature)
    click.echo(value.format())


@cli.command("eval1d")
@_groupoid_option
@click.option(
    "--rep", "rep_path", required=True, type=_input_file, help="Representation."
)
@click.option("-e", "--expr", "expression", required=True, help="Expression text.")
def eval1d(groupoid_path: Path, rep_path: Path, expression: str):
    """Evaluate a one-dimensional expression on a representation."""
    with _malformed_input_exits():
        signature, value = _evaluate_line(groupoid_path, rep_path, expression)
    click.echo(signature)
    click.echo(value.format())


@cli.command()
@_groupoid_option
@_category_option
@click.option(
    "--direction",
    type=click.Choice(DERIVATIONS),
    required=True,
    help="Derive pairings from delta and nu (eta) or the converse (delta).",
)
@click.option(
    "-o",
    "--output",
    "output_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Where to write the completed category.",
)
def derive(
    groupoid_path: Path, category_path: Path, direction: str, output_path: Path
):
    """Add derived Frobenius blocks to a category and re-verify it."""
    with _malformed_input_exits():
        groupoid = load_groupoid(groupoid_path)
        derived = derive_structure(load_category(category_path, groupoid), direction)
        reports = [check_axioms(derived)]
        if isinstance(derived, CrossedFrobData):
            reports.append(check_crossing(derived))
        report = Report.merge(reports, name="derive")
        write_document(output_path, dump_category(derived))
    click.echo(f"Wrote {output_path}")
    _finish(report, RunConfig(command="derive"))


@cli.command()
@_groupoid_option
@click.option(
    "--kind",
    type=click.Choice(["groupoid-algebra"]),
    default="groupoid-algebra",
    show_default=True,
    help="Which example category to build.",
)
@click.option(
    "--grading",
    type=click.Choice(["loops", "all"]),
    default="loops",
    show_default=True,
    help="Crossed loops-graded category, or every morphism graded.",
)
@click.option("--prime", type=int, help="Work over GF(prime) instead of QQ.")
@click.option(
    "-o",
    "--output",
    "output_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Where to write the category.",
)
def example(
    groupoid_path: Path,
    kind: str,
    grading: str,
    prime: Optional[int],
    output_path: Path,
):
    """Write an example category over a groupoid."""
    with _malformed_input_exits():
        field = RATIONALS if prime is None else FieldSpec(kind="prime-field", p=prime)
        groupoid = load_groupoid(groupoid_path)
        if grading == "loops":
            category = groupoid_algebra(groupoid, field)
        else:
            category = groupoid_algebra_category(groupoid, field)
        write_document(output_path, dump_category(category))
    click.echo(f"Wrote the {kind} to {output_path}")

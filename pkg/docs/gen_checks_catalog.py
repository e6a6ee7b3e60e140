"""
Runs every check on the groupoid algebra of the cyclic group of order two
and lists the check ids with their instance counts.
"""

from pathlib import Path
from textwrap import dedent

import mkdocs_gen_files

from prefect_hqft.evaluator import check_moves
from prefect_hqft.groupoid import cyclic_group
from prefect_hqft.gvcat import check_axioms, check_crossing, groupoid_algebra
from prefect_hqft.reports import Report

category = groupoid_algebra(cyclic_group(2))
report = Report.merge(
    [check_axioms(category), check_crossing(category), check_moves(category)],
    name="catalog",
)

with mkdocs_gen_files.open(Path("checks_catalog.md"), "w") as generated_file:
    generated_file.write(
        dedent(
            """
            # Checks Catalog

            Every check id, with the number of instances it has on the
            groupoid algebra of the cyclic group of order two. Pass ids to
            `prefect-hqft verify --checks` by their prefix before the dot.

            | Check | Instances |
            | ----- | --------- |
            """
        ).lstrip()
    )
    for check, bucket in report.counts().items():
        total = bucket["passed"] + bucket["failed"]
        generated_file.write(f"| `{check}` | {total} |\n")

"""Deterministic verification reports shared by every checker."""

from typing import Any, Dict, Iterable, List, Optional, Tuple

from pydantic import VERSION as PYDANTIC_VERSION

if PYDANTIC_VERSION.startswith("2."):
    from pydantic.v1 import BaseModel, Field, validator
else:
    from pydantic import BaseModel, Field, validator

from prefect_hqft.exactlin import ExactMatrix


def _encode_matrix(matrix: ExactMatrix) -> List[List[Any]]:
    return matrix.to_rows()


class ReportEntry(BaseModel):
    """
    The outcome of one check on one instance.

    Witness matrices are kept only for failing entries.
    """

    check: str = Field(..., description="Identifier of the identity checked.")
    instance: Tuple[str, ...] = Field(
        default=(), description="Labels the identity was instantiated at."
    )
    passed: bool = Field(..., description="Whether both sides agreed.")
    lhs: Optional[ExactMatrix] = Field(
        default=None, description="Left-hand side, on failure."
    )
    rhs: Optional[ExactMatrix] = Field(
        default=None, description="Right-hand side, on failure."
    )
    detail: Optional[str] = Field(
        default=None, description="Free-form explanation of a failure."
    )

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False
        json_encoders = {ExactMatrix: _encode_matrix}

    @classmethod
    def compare(
        cls,
        check: str,
        instance: Iterable[str],
        lhs: ExactMatrix,
        rhs: ExactMatrix,
    ) -> "ReportEntry":
        """
        Records whether two matrices are exactly equal.
        """
        passed = lhs == rhs
        if passed:
            return cls(check=check, instance=tuple(instance), passed=True)
        detail = None
        if lhs.shape != rhs.shape:
            detail = f"Shapes differ: {lhs.shape} against {rhs.shape}."
        return cls(
            check=check,
            instance=tuple(instance),
            passed=False,
            lhs=lhs,
            rhs=rhs,
            detail=detail,
        )

    @classmethod
    def verdict(
        cls, check: str, instance: Iterable[str], passed: bool, detail: str = None
    ) -> "ReportEntry":
        """
        Records a yes/no outcome that has no matrix witnesses.
        """
        return cls(
            check=check,
            instance=tuple(instance),
            passed=passed,
            detail=None if passed else detail,
        )

    def describe(self) -> str:
        """One-line human-readable rendering."""
        status = "ok" if self.passed else "FAIL"
        text = f"[{status}] {self.check}({', '.join(self.instance)})"
        if self.detail:
            text += f": {self.detail}"
        return text


class Report(BaseModel):
    """
    A named, deterministically ordered collection of check outcomes.

    Entries are sorted by check identifier, then instance, so two runs on the
    same input produce byte-identical JSON.

    Examples:
        Merge the reports of two checkers and list what failed:
        ```python
        from prefect_hqft.reports import Report

        report = Report.merge([groupoid_report, axiom_report], name="verify")
        for entry in report.failures():
            print(entry.describe())
        ```
    """

    name: str = Field(..., description="What was verified.")
    entries: List[ReportEntry] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(
        default_factory=dict, description="Run parameters such as seeds."
    )

    class Config:
        arbitrary_types_allowed = True
        json_encoders = {ExactMatrix: _encode_matrix}

    @validator("entries")
    def _sort_entries(cls, entries):
        """
        Sorts entries by check, then instance.
        """
        return sorted(entries, key=lambda entry: (entry.check, entry.instance))

    @property
    def passed(self) -> bool:
        """True when no entry failed."""
        return all(entry.passed for entry in self.entries)

    def failures(self) -> List[ReportEntry]:
        """The failing entries, in report order."""
        return [entry for entry in self.entries if not entry.passed]

    def checks(self) -> List[str]:
        """Distinct check identifiers present in the report."""
        return sorted({entry.check for entry in self.entries})

    def counts(self) -> Dict[str, Dict[str, int]]:
        """Per check, the number of passing and failing instances."""
        counts: Dict[str, Dict[str, int]] = {}
        for entry in self.entries:
            bucket = counts.setdefault(entry.check, {"passed": 0, "failed": 0})
            bucket["passed" if entry.passed else "failed"] += 1
        return counts

    def headline(self) -> str:
        """One line: how many instances passed."""
        passed = len(self.entries) - len(self.failures())
        return (
            f"Report '{self.name}': {passed}/{len(self.entries)} instances passed"
        )

    def summary(self) -> str:
        """Multi-line text summary with one line per check and failure."""
        lines = [f"{self.name}: {'PASSED' if self.passed else 'FAILED'}"]
        for check, bucket in self.counts().items():
            lines.append(
                f"  {check}: {bucket['passed']} passed, {bucket['failed']} failed"
            )
        for entry in self.failures():
            lines.append("    " + entry.describe())
        return "\n".join(lines)

    def to_json(self) -> str:
        """Stable JSON rendering."""
        return self.json(indent=2, sort_keys=True)

    @classmethod
    def merge(
        cls,
        reports: Iterable["Report"],
        name: str,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "Report":
        """
        Concatenates several reports; metadata of later reports wins.
        """
        entries: List[ReportEntry] = []
        merged_metadata: Dict[str, Any] = {}
        for report in reports:
            entries.extend(report.entries)
            merged_metadata.update(report.metadata)
        merged_metadata.update(metadata or {})
        return cls(name=name, entries=entries, metadata=merged_metadata)

"""Configuration for verification runs."""

from pathlib import Path
from typing import Dict, List, Optional

from prefect.blocks.core import Block
from pydantic import VERSION as PYDANTIC_VERSION

if PYDANTIC_VERSION.startswith("2."):
    from pydantic.v1 import BaseModel, Field, validator
else:
    from pydantic import BaseModel, Field, validator

from prefect_hqft.evaluator import DEFAULT_TRIALS, MOVE_NAMES
from prefect_hqft.gvcat import AXIOM_MODES

VERIFY_CHECKS = AXIOM_MODES + ("crossing",)
DEFAULT_SEED = 0


def _validate_checks(checks: Optional[List[str]]) -> Optional[List[str]]:
    if checks is None:
        return None
    known = set(VERIFY_CHECKS) | set(MOVE_NAMES)
    unknown = [check for check in checks if check not in known]
    if unknown:
        raise ValueError(
            f"Unknown checks {unknown}; choose from {sorted(known)}."
        )
    return list(dict.fromkeys(checks))


class VerificationSettings(Block):
    """
    Block used to store the defaults of verification runs.

    Args:
        seed (int): The seed every sampled check derives its randomness from.
        trials (int): How many instances each sampled move family checks.
        checks (list of str): Axiom modes, `crossing` or move family names
            to run; all applicable ones when unset.

    Example:
        Load stored verification settings:
        ```python
        from prefect_hqft.settings import VerificationSettings

        settings = VerificationSettings.load("BLOCK_NAME")
        ```
    """

    _block_type_name = "HQFT Verification Settings"

    seed: int = Field(
        default=DEFAULT_SEED,
        description="The seed every sampled check derives its randomness from.",
    )
    trials: int = Field(
        default=DEFAULT_TRIALS,
        gt=0,
        description="How many instances each sampled move family checks.",
    )
    checks: Optional[List[str]] = Field(
        default=None,
        description="Checks to run; all applicable ones when unset.",
    )

    _checks = validator("checks", allow_reuse=True)(_validate_checks)


class RunConfig(BaseModel):
    """
    A fully resolved command-line run.

    Args:
        command: The command being run.
        inputs: Input files keyed by role, e.g. `groupoid` or `category`.
        checks: The checks to run; all applicable ones when unset.
        seed: The seed of sampled checks.
        trials: Instances per sampled move family.
        report: Where to write the JSON report, if anywhere.
    """

    command: str = Field(..., description="The command being run.")
    inputs: Dict[str, Path] = Field(
        default_factory=dict, description="Input files keyed by role."
    )
    checks: Optional[List[str]] = Field(default=None, description="Checks to run.")
    seed: int = Field(default=DEFAULT_SEED, description="Seed of sampled checks.")
    trials: int = Field(
        default=DEFAULT_TRIALS, gt=0, description="Instances per move family."
    )
    report: Optional[Path] = Field(default=None, description="Report path.")

    class Config:
        allow_mutation = False

    _checks = validator("checks", allow_reuse=True)(_validate_checks)

    @classmethod
    def from_settings(
        cls,
        command: str,
        settings: Optional[VerificationSettings] = None,
        **flags,
    ) -> "RunConfig":
        """
        Resolves a run from saved settings and explicit flags; flags that
        are not `None` win over the settings.

        Examples:
            ```python
            from prefect_hqft.settings import RunConfig, VerificationSettings

            saved = VerificationSettings(seed=7, trials=32)
            config = RunConfig.from_settings("moves", saved, trials=8)
            assert (config.seed, config.trials) == (7, 8)
            ```
        """
        values = {}
        if settings is not None:
            values.update(
                seed=settings.seed, trials=settings.trials, checks=settings.checks
            )
        values.update({key: value for key, value in flags.items() if value is not None})
        return cls(command=command, **values)

    def selected(self, available: List[str]) -> List[str]:
        """The checks of this run among `available`, in `available` order."""
        if self.checks is None:
            return list(available)
        return [check for check in available if check in self.checks]

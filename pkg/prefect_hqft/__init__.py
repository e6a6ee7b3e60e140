from prefect_hqft._version import __version__  # noqa
from prefect_hqft.exactlin import ExactMatrix, FieldSpec  # noqa
from prefect_hqft.groupoid import Groupoid  # noqa
from prefect_hqft.gvcat import CrossedFrobData, GVCategory  # noqa
from prefect_hqft.onedim import DualizableRep  # noqa
from prefect_hqft.reports import Report  # noqa
from prefect_hqft.settings import VerificationSettings  # noqa

"""Python front end of the avgh library."""

from ._avgh import *  # noqa: F401,F403
from ._avgh import __version__


def report_text(result):
    """report.txt of a run_config / run_config_text result as str."""
    return result["files"]["report.txt"].decode()

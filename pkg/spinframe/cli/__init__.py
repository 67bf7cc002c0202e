"""
Command-line interface for spinframe.
"""

from spinframe.cli.commands import (CommandContext, cmd_check, cmd_curvature_table, cmd_inspect,
                                    cmd_reconstruct)
from spinframe.cli.report import CheckResult, Report

__all__ = [
    "CommandContext",
    "CheckResult",
    "Report",
    "cmd_check",
    "cmd_curvature_table",
    "cmd_inspect",
    "cmd_reconstruct",
]

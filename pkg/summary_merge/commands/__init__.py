"""
Summary Merge - Commands Module
"""
from .aggregate import cmd_check, cmd_combine, cmd_recover, run_check, select_recovery_pair

__all__ = [
    "cmd_check",
    "cmd_combine",
    "cmd_recover",
    "run_check",
    "select_recovery_pair",
]

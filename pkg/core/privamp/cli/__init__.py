"""
CLI package: command-line front end of the toolkit.

Design Patterns
───────────────
• Command       – each CLI operation is a ``Command`` object with ``execute()``.
• Interpreter   – parsing the argument list into a command and its options.
"""
from .command_processor import CommandProcessor
from .commands import (
    Command,
    CommandResult,
    EACommand,
    EntropyCommand,
    ExponentCommand,
    HelpCommand,
    ModerateCommand,
    RunContext,
    SimulateCommand,
    VerifyCommand,
    WiretapCommand,
)

__all__ = [
    'CommandProcessor',
    'Command',
    'CommandResult',
    'EACommand',
    'EntropyCommand',
    'ExponentCommand',
    'HelpCommand',
    'ModerateCommand',
    'RunContext',
    'SimulateCommand',
    'VerifyCommand',
    'WiretapCommand',
]

"""
    CommandProcessor: parses raw CLI arguments and dispatches commands.

    Design Patterns
    ───────────────
    • Interpreter   – turns the argument list into a ``Command`` and its options.
    • Facade        – single ``process(argv)`` entry-point hides parsing,
                      configuration, execution, error mapping and output.

    Options are ``--key=value`` or ``--key value``; list values are comma
    separated.  Global options configure the run, the remaining ones are
    checked against the selected command.  A raised ``PrivampError``
    becomes a failed ``CommandResult`` with the error's exit code.
"""
import logging
import shlex
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from api.exceptions import PrivampError, ValidationError
from api.types import TypeValidator, Units, ValueType

from services.serialization_service import ResultSerializer

from ..config import PlatformConfig, SerializationConfig
from .commands import COMMANDS, CommandResult, RunContext

logger = logging.getLogger(__name__)

GLOBAL_OPTIONS = frozenset({"state", "fixture", "out", "format", "units", "seed", "threads",
                            "log_level"})
FLAGS = frozenset({"breakdown"})
FORMATS = ("json", "csv")


class CommandProcessor:
    """
    Parses CLI arguments, creates ``Command`` objects and executes them.

    Usage:
        processor = CommandProcessor()
        result = processor.process(["simulate", "--fixture", "correlated-bit", "--u", "1", "--v", "1"])
        result = processor.process("exponent --fixture uniform-bit --family pa --side ach --rate 0.3")
    """

    def __init__(self, config: Optional[PlatformConfig] = None):
        self._base = config or PlatformConfig()

    # ── Public API ───────────────────────────────────────────────

    def process(self, argv: Union[str, Sequence[str]]) -> CommandResult:
        """
        Parse and execute one command.

        Returns:
            ``CommandResult`` with the exit code and the rendered output
            (empty when ``--out`` redirected it to a file).
        """
        if isinstance(argv, str):
            text = self._strip_comments(argv).strip()
            try:
                argv = shlex.split(text)
            except ValueError as e:
                return CommandResult(False, f"Parse error: {e}", ValidationError.exit_code)
        try:
            options, positional = self.split_options(list(argv))
            if not positional:
                raise ValidationError("No command given. Type 'help' for usage.")
            verb = positional[0].lower()
            if verb not in COMMANDS:
                raise ValidationError(f"Unknown command: '{verb}'. Type 'help' for usage.")
            if len(positional) > 1:
                raise ValidationError(f"Unexpected argument(s): {' '.join(positional[1:])}.")
            command = COMMANDS[verb]()
            unknown = sorted(set(options) - GLOBAL_OPTIONS - command.options)
            if unknown:
                raise ValidationError(f"Unknown option(s) for {verb}: "
                                      f"{', '.join('--' + k for k in unknown)}.")
            config = self.resolve_config(options)
            context = RunContext(config, ResultSerializer(config.serialization), options)
            result = command.execute(context)
        except PrivampError as e:
            logger.debug("command failed", exc_info=True)
            return CommandResult(False, str(e), e.exit_code)

        out = options.get("out")
        if out and result.output:
            with open(str(out), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(result.output)
            result.message = f"{result.message} Wrote {out}."
            result.output = ""
        return result

    # ── Configuration ────────────────────────────────────────────

    def resolve_config(self, options: Dict[str, Any]) -> PlatformConfig:
        """Copy of the base configuration with the global options applied."""
        base = self._base
        fmt = str(options.get("format", base.serialization.format)).lower()
        if fmt not in FORMATS:
            raise ValidationError(f"Unknown format '{fmt}'. Expected one of: {', '.join(FORMATS)}.")
        units = TypeValidator.parse_enum(options.get("units", base.serialization.units), Units, "units")
        seed = TypeValidator.validate_and_convert(options.get("seed", base.seed), ValueType.INT, "--seed")
        threads = TypeValidator.validate_and_convert(options.get("threads", base.threads),
                                                     ValueType.INT, "--threads")
        if threads < 0:
            raise ValidationError(f"--threads must be ≥ 0, got {threads}.")
        serialization = SerializationConfig(
            format=fmt, units=units,
            significant_digits=base.serialization.significant_digits,
            include_breakdown=base.serialization.include_breakdown,
        )
        return PlatformConfig(optimizer=base.optimizer, exponents=base.exponents,
                              serialization=serialization, verifier=base.verifier,
                              tolerances=base.tolerances, limits=base.limits,
                              threads=threads, seed=seed)

    # ── Comment handling ────────────────────────────────────────

    @staticmethod
    def _strip_comments(text: str) -> str:
        """
        Strip inline comments: everything after an unquoted ``#``.

        Example:
            >>> CommandProcessor._strip_comments("verify --trials 10  # quick")
            'verify --trials 10'
        """
        in_single = False
        in_double = False
        for i, ch in enumerate(text):
            if ch == "'" and not in_double:
                in_single = not in_single
            elif ch == '"' and not in_single:
                in_double = not in_double
            elif ch == '#' and not in_single and not in_double:
                return text[:i].rstrip()
        return text

    # ── Token parser ─────────────────────────────────────────────

    @staticmethod
    def split_options(tokens: List[str]) -> Tuple[Dict[str, Any], List[str]]:
        """
        Separate ``--key=value`` / ``--key value`` options from positional tokens.

        Dashes inside keys become underscores (``--log-level`` → ``log_level``).
        Flags in ``FLAGS`` take no value.

        Raises:
            ValidationError: For a repeated option or a missing value.
        """
        options: Dict[str, Any] = {}
        positional: List[str] = []
        i = 0
        while i < len(tokens):
            token = tokens[i]
            if token.startswith("--") and len(token) > 2:
                body = token[2:]
                if "=" in body:
                    key, value = body.split("=", 1)
                elif body in FLAGS:
                    key, value = body, True
                elif i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
                    key, value = body, tokens[i + 1]
                    i += 1
                else:
                    raise ValidationError(f"Option --{body} needs a value.")
                key = key.replace("-", "_")
                if key in options:
                    raise ValidationError(f"Option --{key} given more than once.")
                options[key] = value
            else:
                positional.append(token)
            i += 1
        return options, positional

"""
Console entry point: ``privamp <command> [options]`` or ``python -m privamp.cli``.
"""
import logging
import sys
from typing import List, Optional

from api.exceptions import PrivampError

from .command_processor import CommandProcessor

logger = logging.getLogger("privamp")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _log_level(argv: List[str]) -> str:
    try:
        options, _ = CommandProcessor.split_options(argv)
    except PrivampError:
        return "WARNING"
    level = str(options.get("log_level", "WARNING")).upper()
    return level if level in LOG_LEVELS else "WARNING"


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=_log_level(argv), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    result = CommandProcessor().process(argv)
    if result.output:
        sys.stdout.write(result.output)
    if result.success:
        logger.info(result.message)
    else:
        logger.error(result.message)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Shared helpers for the line-oriented text formats."""

import math


class ParseError(ValueError):
    """Malformed input in one of the text formats.

    ``line`` is the 1-based line number when the error is attributable to
    a single line, else None.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


def format_real(x: float) -> str:
    """Render a float so that parsing the token recovers it bit-exactly.

    Integral values print without a fractional part (`7`, not `7.0`),
    everything else uses repr, which is the shortest exact decimal.
    """
    x = float(x)
    if math.isfinite(x) and x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def content_lines(text: str):
    """Yield (lineno, line) for non-blank, non-comment lines of *text*.

    Line numbers are 1-based over the whole stream so parse errors point
    at the real location.  Comment lines start with '#' after optional
    leading whitespace.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        yield lineno, raw


def comment_lines(text: str):
    """Yield the comment lines of *text*, '#' prefix stripped."""
    for raw in text.splitlines():
        stripped = raw.lstrip()
        if stripped.startswith("#"):
            yield stripped[1:].strip()

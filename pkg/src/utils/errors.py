"""Exception hierarchy shared by every stage of the annotation pipeline.

Each class carries the process exit status the CLI reports for it:
0 success, 2 input/parse, 3 unmatchable/degenerate, 4 layout.
"""

from typing import Optional


class IdeophoneError(Exception):
    exit_code = 1


# Input and parse failures (exit 2)

class InputError(IdeophoneError):
    exit_code = 2


class ParseError(InputError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LexiconError(InputError):
    def __init__(self, message: str, record: Optional[int] = None):
        self.record = record
        if record is not None:
            message = f"record {record}: {message}"
        super().__init__(message)


class DetectionError(InputError):
    def __init__(self, message: str, record: Optional[int] = None):
        self.record = record
        if record is not None:
            message = f"detection {record}: {message}"
        super().__init__(message)


class ScoreRangeError(InputError, ValueError):
    """A confidence or raw smile score outside [0, 1]."""


class IndexFormatError(InputError):
    pass


class IndexVersionError(IndexFormatError):
    pass


class IndexCorruptionError(IndexFormatError):
    pass


class DetectorError(InputError):
    def __init__(self, message: str, stderr: str = "", returncode: Optional[int] = None):
        self.stderr = stderr
        self.returncode = returncode
        if stderr:
            message = f"{message}\n--- detector stderr ---\n{stderr.rstrip()}"
        super().__init__(message)


class FontError(InputError):
    pass


class MissingGlyphError(FontError):
    def __init__(self, char: str, font_path: str):
        self.char = char
        self.code_point = ord(char)
        super().__init__(f"font {font_path} has no glyph for U+{ord(char):04X} ({char!r})")


# Degenerate or unmatchable inputs (exit 3)

class DegenerateError(IdeophoneError):
    exit_code = 3


class DegenerateVectorError(DegenerateError, ValueError):
    pass


class NothingDetectedError(DegenerateError):
    pass


class UnmatchablePhotoError(DegenerateError):
    pass


class DegenerateQueryError(DegenerateError):
    pass


# Layout failures (exit 4)

class LayoutError(IdeophoneError):
    exit_code = 4

"""Exception hierarchy shared by all reqlint modules."""


class ReqlintError(Exception):
    """Base class for every error reqlint raises on purpose."""


class PatternError(ReqlintError):
    """A configured regular expression does not compile."""


class ResourceError(ReqlintError):
    """A resource file is missing, malformed, or required but empty."""


class FormatError(ReqlintError):
    """A catalog or label file could not be parsed."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class ValidationError(ReqlintError):
    """One or more rules violate the catalog invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class BadParams(ReqlintError):
    """Checker parameters are missing or invalid."""


class UnknownChecker(ReqlintError):
    """A checker id is not registered."""


class CatalogMismatch(ReqlintError):
    """Reports produced from different catalogs cannot be merged."""


class LengthMismatch(ReqlintError):
    """Two label sequences differ in length or are empty."""


class DegenerateError(ReqlintError):
    """Agreement is undefined for the given labelings."""

"""Exception classes shared across the package.

The CLI maps each class to a stable exit status (see ``cli.EXIT_CODES``).
"""


class DomainError(ValueError):
    """An argument falls outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A configuration document is missing a field or violates a constraint."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class CapacityError(RuntimeError):
    """A requested run would exceed the configured memory budget."""


class InvariantViolation(AssertionError):
    """An internal conservation or consistency check failed."""

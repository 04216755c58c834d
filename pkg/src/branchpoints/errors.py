"""Error types shared across the package.

Every raised error carries a short machine-readable ``code`` so the CLI can
map failures onto exit statuses and tests can pin the exact failure mode.
"""


class ValidationError(ValueError):
    """Bad input or a violated precondition.  CLI exit status 2."""

    def __init__(self, code, detail=""):
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or met an unexpected
    structure that the algorithms cannot continue from.  CLI exit status 3."""

    def __init__(self, code, detail=""):
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)

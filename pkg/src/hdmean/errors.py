"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A computation produced an unusable numerical result (e.g. a
    non-positive variance estimate or a matrix that is not PSD).

    Kept distinct from ValueError so callers (notably the CLI) can tell
    bad inputs apart from numerical failures.
    """

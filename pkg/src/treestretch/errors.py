"""Exception hierarchy shared by every module.

Each exception carries an ``exit_code`` used by the command line front end:
1 for malformed input, 2 for a violated precondition.
"""


class TreeStretchError(Exception):
    exit_code = 2


class ParseError(TreeStretchError, ValueError):
    exit_code = 1


class InvalidPrime(TreeStretchError, ValueError):
    pass


class NotHyperbolic(TreeStretchError, ValueError):
    pass


class NotInSL2(TreeStretchError, ValueError):
    pass


class PrimeMismatch(TreeStretchError, ValueError):
    pass


class InKError(TreeStretchError, ValueError):
    """Raised when a construction needs g outside the maximal compact SL2(Z_p)."""


class InvalidGraph(TreeStretchError, ValueError):
    """A marked graph violates one or more invariants.

    ``problems`` lists every violation as ``(kind, detail)`` where kind is one of
    ``Disconnected``, ``ValenceBelowTwo``, ``NonpositiveLength``,
    ``MarkingRankMismatch``.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(f"{kind}: {detail}" for kind, detail in self.problems))

    @property
    def kinds(self):
        return {kind for kind, _ in self.problems}


class BadWord(TreeStretchError, ValueError):
    pass


class RankMismatch(TreeStretchError, ValueError):
    pass


class InconsistentMap(TreeStretchError, ValueError):
    pass

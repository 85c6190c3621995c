"""Exception types shared across the package."""


class GamesecError(Exception):
    """Base class for every error raised by gamesec."""


class LatticeError(GamesecError):
    """A lattice declaration is malformed or a level is not a member."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class TypeSyntaxError(GamesecError):
    def __init__(self, message, line=1, col=1):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class MembershipError(GamesecError):
    """A move does not belong to the (bounded) game it is used in."""


class BudgetError(GamesecError):
    """An enumeration exceeded its configured budget."""


class GameMismatchError(GamesecError):
    pass


class InvalidPlayError(GamesecError):
    def __init__(self, message, play=None, diagnostics=None):
        super().__init__(message)
        self.play = play
        self.diagnostics = list(diagnostics or [])


class StrategyError(GamesecError):
    """A play set violates a strategy or skeleton law; carries witnesses."""

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = list(witnesses)


class ProtectionError(GamesecError):
    """A protected-type side condition or a level coercion was refused."""

    def __init__(self, message, required=None, found=None, witness=None):
        super().__init__(message)
        self.required = required
        self.found = found
        self.witness = witness


class DCCTypeError(GamesecError):
    def __init__(self, message, rule=None):
        super().__init__(message)
        self.rule = rule

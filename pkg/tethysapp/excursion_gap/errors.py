class ExcursionGapError(Exception):
    """
    Base class for errors raised by the excursion gap toolkit.
    """


class InvalidInputError(ExcursionGapError, ValueError):
    """
    Raised when an input fails validation.

    The name of the offending field is kept on the exception so the command line
    and the portal can report it back to the user.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SolverError(ExcursionGapError, RuntimeError):
    """
    Raised when a dense linear solve degrades.
    """


class HypothesisError(ExcursionGapError):
    """
    Raised when the hypotheses an analysis depends on are not met.

    Examples are a reducible induced chain handed to the mixing bound, or an
    evaluation problem where the target policy is not covered by the behavior.
    """


class NotReachedError(HypothesisError):
    """
    Raised when a chain does not reach epsilon-stationarity within t_max steps.
    """


class TiedScoresError(InvalidInputError):
    """
    Raised when a ranking is requested for a score list whose entries are all tied.
    """

    def __init__(self, field):
        super().__init__(field, "all scores are tied, rank correlation is undefined")

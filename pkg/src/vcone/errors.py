class InvalidInputError(ValueError):
    """Raised when an operation's preconditions are violated."""


class SolverFailureError(RuntimeError):
    """Raised when the LP solver cannot certify a result."""


class TotalityError(KeyError):
    """A v-causal strategy was queried on a realizable transcript it does not cover."""

    def __init__(self, party, setting, transcript):
        self.party = party
        self.setting = setting
        self.transcript = transcript
        super().__init__(
            f"strategy for party {party!r} undefined at setting {setting} "
            f"with transcript {sorted(transcript)}"
        )


class InternalInconsistencyError(RuntimeError):
    """The signalling demo certified S > 7 with local BC|AD but found no
    no-signalling violation; this would contradict the polytope bound."""

"""Exception hierarchy shared across the simulator."""


class PhonesimError(Exception):
    """Base class for all simulator errors."""


# -- scheduling / engine ------------------------------------------------------

class UnknownAnchor(PhonesimError):
    pass


class CyclicSchedule(PhonesimError):
    pass


class PayloadToolMissing(PhonesimError):
    """An event payload names a tool that does not exist; scenario-authoring bug."""


class IncompatibleSnapshot(PhonesimError):
    pass


# -- app machines -------------------------------------------------------------

class DuplicateAppId(PhonesimError):
    pass


class InvalidMachine(PhonesimError):
    pass


class UnknownState(PhonesimError):
    pass


class ToolNotAvailableInState(PhonesimError):
    """Raised when the user invokes a tool outside the current screen's table."""


class GuardFailed(PhonesimError):
    """A transition guard rejected the call; state is left unchanged."""


class ArgumentInvalid(PhonesimError):
    pass


class WriteInObserveMode(PhonesimError):
    pass


# -- interfaces ---------------------------------------------------------------

class NavigationNotAvailable(PhonesimError):
    pass


class ProposalAlreadyPending(PhonesimError):
    pass


class NoPendingProposal(PhonesimError):
    pass


# -- agents -------------------------------------------------------------------

class EpisodeFinished(PhonesimError):
    pass


class MalformedAction(PhonesimError):
    """Recoverable per-cycle parse failure of a policy's output."""


class EndpointUnavailable(PhonesimError):
    pass


class RetriesExhausted(PhonesimError):
    pass


class AbortedEpisode(PhonesimError):
    """A policy adapter failed; the run is recorded as unsuccessful."""


# -- scenarios ----------------------------------------------------------------

class ScenarioParseError(PhonesimError):
    pass


class SchemaError(PhonesimError):
    """Scenario file failed static validation; message carries field diagnostics."""


class SeedDataInvalid(PhonesimError):
    pass


class OracleExecutionError(PhonesimError):
    pass


# -- metrics ------------------------------------------------------------------

class NoProposals(PhonesimError):
    """Acceptance rate is undefined when no proposals were made."""


class UnevenRunCounts(PhonesimError):
    pass

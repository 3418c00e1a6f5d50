"""Exception hierarchy shared by all modules."""


class PomverifyError(Exception):
    """Base class for every error raised by the package."""


class RangeTooLarge(PomverifyError):
    """A requested prime computation exceeds the configured sieve ceiling."""


class DomainError(PomverifyError, ValueError):
    """An argument lies outside the validity range of a formula."""


class ProfileError(PomverifyError):
    """The active bound profile does not permit the requested inequality."""


class Indeterminate(PomverifyError):
    """Neither the exact path nor the bounds path could decide a question."""


class WindowInvalid(PomverifyError):
    """A prime window does not match the base it is used with."""


class InapplicableWitness(PomverifyError):
    """An even witness cannot be transferred to the odd half of its modulus."""


class UncertifiableAtPrecision(PomverifyError):
    """Interval enclosures are too wide to decide a sign; retry with more bits."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

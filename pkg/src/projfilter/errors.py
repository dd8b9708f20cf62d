"""Exception hierarchy shared by all modules."""


class ProjFilterError(Exception):
    """Base class for every error raised by the package."""


class DegenerateMap(ProjFilterError):
    pass


class CoincidentPoints(ProjFilterError):
    pass


class DegenerateWindows(ProjFilterError):
    pass


class DegenerateImage(ProjFilterError):
    pass


class OutOfRange(ProjFilterError):
    pass


class IndeterminateValue(ProjFilterError):
    pass


class ConstantFunction(ProjFilterError):
    pass


class LiftFailure(ProjFilterError):
    pass


class AnchorMismatch(ProjFilterError):
    pass


class PreconditionViolated(ProjFilterError):
    pass


class MembershipViolated(ProjFilterError):
    pass


class ClassInfeasible(ProjFilterError):
    pass


class ValueCoincidenceAtEndpoint(ProjFilterError):
    pass


class NotCoprime(ProjFilterError):
    pass


class IllConditioned(ProjFilterError):
    pass


class AlreadyOptimal(ProjFilterError):
    pass


class NormalizationFailed(ProjFilterError):
    pass


class StepNotFound(ProjFilterError):
    pass


class InfeasibleClass(ClassInfeasible):
    pass


class Stalled(ProjFilterError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report

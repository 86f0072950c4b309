class CocycleLabError(Exception):
    exit_code = 1


class InputError(CocycleLabError):
    exit_code = 1


class ParseError(InputError):
    pass


class GroupAxiomError(InputError):
    pass


class DivisibilityError(InputError):
    pass


class ModuleMismatch(InputError):
    pass


class WrongCoefficientKind(InputError):
    pass


class UnsupportedDegree(InputError):
    pass


class SectionFailure(InputError):
    pass


class SectionInvalid(InputError):
    pass


class KernelMismatch(InputError):
    pass


class NonIsometricModule(InputError):
    pass


class NotSmallEnough(InputError):
    def __init__(self, rho0, threshold):
        self.rho0 = rho0
        self.threshold = threshold
        super().__init__(f"rho0(0, psi) = {rho0} exceeds threshold {threshold}")


class CapacityExceeded(CocycleLabError):
    exit_code = 2


class VerificationFailure(CocycleLabError):
    exit_code = 3


class NotACocycle(VerificationFailure):
    def __init__(self, message: str = "cochain is not a cocycle", failing=None):
        self.failing = failing
        if failing is not None:
            message = f"{message} (first failing tuple {failing})"
        super().__init__(message)


class InternalBreach(CocycleLabError):
    exit_code = 4


class RegularityBreach(InternalBreach):
    pass

"""Exception hierarchy shared by the library and the command-line front end."""


class SymdiscError(Exception):
    """Base class; ``code`` is the machine-readable identifier used in JSON output."""

    code = "error"


class InvalidInput(SymdiscError, ValueError):
    code = "invalid_input"


class NotInDomain(SymdiscError):
    code = "not_in_domain"


class RootFindingError(SymdiscError, ArithmeticError):
    code = "root_nonconvergence"


class ReconciliationFailure(SymdiscError, ArithmeticError):
    """Two independent routes to the same quantity disagree beyond tolerance."""

    code = "reconciliation_failure"

    def __init__(self, what, primary, secondary, tol):
        self.what = what
        self.primary = primary
        self.secondary = secondary
        self.tol = tol
        super().__init__(
            f"{what}: routes disagree, {primary!r} vs {secondary!r} "
            f"(|diff| = {abs(primary - secondary):.3e} > {tol:.1e})"
        )


class Unbounded(SymdiscError, ArithmeticError):
    """The scaled point never entered the domain; the oracle is not absorbing."""

    code = "unbounded"


class PoleAt(SymdiscError, ZeroDivisionError):
    code = "pole"

    def __init__(self, z):
        self.z = z
        super().__init__(f"pole of F_s at z = {z!r}")


class DegenerateStep(SymdiscError):
    """A Schur-Cohn reflection coefficient sits on the unit circle."""

    code = "degenerate_step"

    def __init__(self, step, modulus):
        self.step = step
        self.modulus = modulus
        super().__init__(f"reflection coefficient {step} has modulus {modulus!r}")

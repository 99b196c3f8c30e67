"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for malformed input (syntax, shapes, indices), 3 for violated preconditions.
"""


class JetError(Exception):
    exit_code = 2


class InputError(JetError):
    exit_code = 2


class PreconditionError(JetError):
    exit_code = 3


class ParseError(InputError):
    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if text is not None and position is not None:
            message = f"{message} at position {position}\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class InvalidIndex(InputError):
    pass


class OrderExceeded(InputError):
    pass


class UnsupportedDivision(InputError):
    pass


class ShapeError(InputError):
    pass


class SymmetryError(InputError):
    pass


class BasisMismatch(InputError):
    pass


class UnboundGenerator(InputError):
    pass


class NonPolynomialInFibre(PreconditionError):
    pass


class DegreeTooLow(PreconditionError):
    pass


class OrderMismatch(PreconditionError):
    pass


class NotContact(PreconditionError):
    pass


class UnsupportedBaseMap(PreconditionError):
    pass


class SingularJacobian(PreconditionError):
    pass


class ShapeConstraint(PreconditionError):
    pass


class NotInKernel(PreconditionError):
    pass


class InconsistentSystem(PreconditionError):
    pass

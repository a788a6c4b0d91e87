"""Exception hierarchy shared by the library and the command-line front end."""


class LFunctionError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for this failure."""

    exit_code = 1


class InputError(LFunctionError, ValueError):
    """Invalid discriminant, form, coefficient file or argument."""

    exit_code = 2


class InvalidFormError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ResourceError(LFunctionError):
    """A configured size or memory budget would be exceeded."""

    exit_code = 3


class NumericalConsistencyError(LFunctionError, ArithmeticError):
    """A quantity that must vanish (imaginary residue, sign check) did not."""

    exit_code = 4


class ConvergenceError(NumericalConsistencyError):
    pass

"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto process status without a lookup table.
"""


class BVKitError(Exception):
    exit_code = 1
    kind = "error"

    def to_json(self):
        return {"error": self.kind, "message": str(self)}


class InvalidArgument(BVKitError, ValueError):
    exit_code = 2
    kind = "invalid-argument"


class NotFound(InvalidArgument, KeyError):
    kind = "not-found"

    def __str__(self):
        # KeyError quotes its message otherwise
        return Exception.__str__(self)


class UnsupportedOperation(InvalidArgument):
    kind = "unsupported-operation"


class UnsupportedInput(InvalidArgument):
    kind = "unsupported-input"


class PreconditionViolation(InvalidArgument):
    """Raised with a witness when an input fails a required property."""

    kind = "precondition-violation"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    def to_json(self):
        out = super().to_json()
        if self.witness is not None:
            out["witness"] = self.witness
        return out


class FamilyMismatch(InvalidArgument):
    kind = "family-mismatch"


class ResourceLimit(BVKitError):
    exit_code = 3
    kind = "resource-limit"

    def __init__(self, message, suggestion=None):
        super().__init__(message)
        self.suggestion = suggestion

    def to_json(self):
        out = super().to_json()
        if self.suggestion:
            out["suggestion"] = self.suggestion
        return out


class CertifiedInequalityViolation(BVKitError):
    """A proven inequality failed numerically. Always a bug signal."""

    exit_code = 4
    kind = "certified-inequality-violation"

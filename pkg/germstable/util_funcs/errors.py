"""
Error hierarchy for the analysis stack.

Every error carries a short ``reason`` code, a human readable ``description``
and the ``origin`` (the function that raised it), the same triple a device
server exception carries. The command line layer maps ``ParseError`` to exit
code 2 and every other ``GermError`` to exit code 3.
"""


class GermError(Exception):
    exit_code = 3

    def __init__(self, description="", origin="", reason=None):
        self.reason = reason or type(self).__name__
        self.description = description
        self.origin = origin
        super().__init__(self.reason, self.description, self.origin)

    def __str__(self):
        text = self.reason
        if self.description:
            text = f"{text}: {self.description}"
        if self.origin:
            text = f"{text} (in {self.origin})"
        return text

    def to_dict(self):
        payload = {
            "reason": self.reason,
            "description": self.description,
            "origin": self.origin,
        }
        payload.update(self.details())
        return payload

    def details(self):
        return {}

    def __reduce__(self):
        return (_rebuild_error, (type(self), self.__dict__.copy()))


def _rebuild_error(cls, state):
    error = cls.__new__(cls)
    Exception.__init__(error, state.get("reason"), state.get("description"))
    error.__dict__.update(state)
    return error


# jets
class NonzeroConstantTerm(GermError):
    pass


class NotInvertible(GermError):
    pass


class ZeroConstantTerm(GermError):
    pass


class ZeroLeadingCoefficient(GermError):
    pass


class UndefinedForPZero(GermError):
    pass


# germ
class NotFixedDirection(GermError):
    pass


# curve
class ZeroParametrization(GermError):
    pass


class _OrderedError(GermError):
    """Error tied to a jet order (first failing order or the order needed)."""

    order_name = "order"

    def __init__(self, order, description="", origin="", reason=None):
        setattr(self, self.order_name, int(order))
        super().__init__(description, origin, reason)

    def __str__(self):
        return f"{super().__str__()} [{self.order_name}={getattr(self, self.order_name)}]"

    def details(self):
        return {self.order_name: getattr(self, self.order_name)}


class NotInvariant(_OrderedError):
    pass


class Obstructed(_OrderedError):
    pass


class OrderExhausted(_OrderedError):
    order_name = "needed"


# reduce
class NotParabolic(GermError):
    pass


class RestrictionIsIdentity(GermError):
    pass


class ReductionFailed(GermError):
    pass


# stable
class AtOrigin(GermError):
    pass


class CannotFit(GermError):
    def __init__(self, predicate, description="", origin="", reason=None):
        self.predicate = predicate
        super().__init__(description, origin, reason)

    def details(self):
        return {"predicate": self.predicate}


class NotSaddle(GermError):
    pass


class NotNode(GermError):
    pass


class NoContraction(GermError):
    def __init__(self, region, description="", origin="", reason=None):
        self.region = region
        super().__init__(description, origin, reason)

    def details(self):
        return {"region": str(self.region)}


class InterpolationBreakdown(GermError):
    pass


# orbit
class TailTooShort(GermError):
    pass


# cli
class ParseError(GermError):
    exit_code = 2

    def __init__(self, line, col, expected, description="", origin="parse_germ_spec"):
        self.line = int(line)
        self.col = int(col)
        self.expected = expected
        super().__init__(description, origin)

    def __str__(self):
        text = f"line {self.line}, col {self.col}: expected {self.expected}"
        if self.description:
            text = f"{text} ({self.description})"
        return text

    def details(self):
        return {"line": self.line, "col": self.col, "expected": self.expected}

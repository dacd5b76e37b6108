"""Exception hierarchy shared by all pickarm modules."""


class PickArmError(Exception):
    """Base class for every error raised by this package."""


class TriangleInequalityViolated(PickArmError, ValueError):
    def __init__(self, A, B, D):
        self.sides = (A, B, D)
        super().__init__(f"sides {A}, {B}, {D} do not form a triangle")


class DegenerateAtShoulder(PickArmError, ValueError):
    def __init__(self, point=None):
        self.point = point
        super().__init__(f"target {point} coincides with the shoulder pivot")


class Unreachable(PickArmError, ValueError):
    def __init__(self, r, a, b):
        self.r, self.a, self.b = r, a, b
        super().__init__(
            f"Unreachable r={r:.6f} outside [{abs(a - b):.6f}, {a + b:.6f}]"
        )


class NonPositiveInput(PickArmError, ValueError):
    pass


class OutOfView(PickArmError, ValueError):
    pass


class AngleOutOfRange(PickArmError, ValueError):
    def __init__(self, angle, lo=0.0, hi=180.0):
        self.angle = angle
        super().__init__(f"angle {angle} deg outside [{lo}, {hi}]")


class NotAGpioPin(PickArmError, LookupError):
    def __init__(self, pin, function):
        self.pin, self.function = pin, function
        super().__init__(f"pin {pin} is {function}, not a GPIO")


class UnknownPin(PickArmError, LookupError):
    pass


class ScenarioInvalid(PickArmError, ValueError):
    pass


class ParseError(ScenarioInvalid):
    def __init__(self, line, reason):
        self.line, self.reason = line, reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(ScenarioInvalid):
    def __init__(self, key, reason):
        self.key, self.reason = key, reason
        super().__init__(f"{key}: {reason}")

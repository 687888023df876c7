"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when parameters, configuration, or initial data violate a contract."""


class SimulationAbort(RuntimeError):
    """Raised when a running simulation detects an invariant violation.

    Carries enough context (step index, time, reason) to diagnose the abort
    from the exception message alone.
    """

    def __init__(self, reason, step=None, t=None):
        self.reason = reason
        self.step = step
        self.t = t
        where = ""
        if step is not None:
            where = f" at step {step}, t={t:.6g}"
        super().__init__(f"simulation aborted{where}: {reason}")

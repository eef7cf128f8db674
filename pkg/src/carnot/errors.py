"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class CarnotError(Exception):
    """Base class for all errors raised by this package."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class SpecError(CarnotError, ValueError):
    """Malformed or schema-violating algebra description."""


class ValidationError(CarnotError, ValueError):
    """The structure constants do not define a stratified nilpotent algebra."""


class JacobiViolation(ValidationError):
    def __init__(self, triple: tuple[int, int, int], residual: dict | None = None):
        self.triple = triple
        self.residual = residual or {}
        i, j, k = (t + 1 for t in triple)
        super().__init__(f"Jacobi identity fails on (e{i}, e{j}, e{k})")

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["witness"] = [t + 1 for t in self.triple]
        d["residual"] = {str(k + 1): str(v) for k, v in sorted(self.residual.items())}
        return d


class GradingViolation(ValidationError):
    def __init__(self, i: int, j: int, k: int, coeff):
        self.i, self.j, self.k, self.coeff = i, j, k, coeff
        super().__init__(
            f"[e{i + 1}, e{j + 1}] has component {coeff} on e{k + 1}, "
            "which is not in the stratum of weight weight(i) + weight(j)"
        )

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["witness"] = {"i": self.i + 1, "j": self.j + 1, "k": self.k + 1,
                        "coeff": str(self.coeff)}
        return d


class NotGenerated(ValidationError):
    def __init__(self, stratum: int, rank: int, dim: int):
        self.stratum, self.rank, self.dim = stratum, rank, dim
        super().__init__(
            f"[V1, V{stratum - 1}] spans a {rank}-dimensional subspace of "
            f"V{stratum} (dimension {dim})"
        )

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["witness"] = {"stratum": self.stratum, "rank": self.rank, "dim": self.dim}
        return d


class CapacityError(CarnotError):
    """Algebra too large for dense exact computation."""


class StepUnsupported(CarnotError):
    """Operation only implemented for step <= 2 (or a specific group)."""


class ConvergenceError(CarnotError, RuntimeError):
    pass

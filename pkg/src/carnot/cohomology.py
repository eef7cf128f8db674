"""Bigraded Lie algebra cohomology H^{q,w} with harmonic representatives."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .algebra import CarnotAlgebra, hausdorff_dimension
from .exterior import DifferentialMaps, Form, ce_differential


@dataclass
class CohomologyTable:
    n: int
    Q: int
    dims: dict[tuple[int, int], int]
    harmonic_basis: dict[tuple[int, int], list[Form]] = field(default_factory=dict)

    def dim(self, q: int, w: int) -> int:
        return self.dims.get((q, w), 0)

    @property
    def betti(self) -> list[int]:
        b = [0] * (self.n + 1)
        for (q, _), d in self.dims.items():
            b[q] += d
        return b

    def weights(self, q: int) -> list[int]:
        """Weights w with H^{q,w} != 0."""
        return sorted(w for (qq, w), d in self.dims.items() if qq == q and d)

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * b for q, b in enumerate(self.betti))

    def to_json(self) -> dict:
        return {
            "dims": {f"{q},{w}": d for (q, w), d in sorted(self.dims.items())},
            "betti": self.betti,
        }


def compute_cohomology(alg: CarnotAlgebra, maps: DifferentialMaps | None = None) -> CohomologyTable:
    maps = maps or ce_differential(alg)
    sp = maps.space
    dims: dict[tuple[int, int], int] = {}
    harmonic: dict[tuple[int, int], list[Form]] = {}
    for q in range(alg.n + 1):
        for w in sp.weights(q):
            size = sp.dim(q, w)
            out = maps.block(q, w)
            inc = maps.block(q - 1, w) if q > 0 else []
            rank_out = linalg.rank(out) if out and size else 0
            rank_in = linalg.rank(inc) if inc and sp.dim(q - 1, w) else 0
            dims[(q, w)] = size - rank_out - rank_in
            # joint kernel of d0 and delta0 = (incoming d0)^T
            stacked = [row for row in out] + (linalg.transpose(inc) if inc and sp.dim(q - 1, w) else [])
            kernel = linalg.nullspace(stacked, size)
            basis = linalg.canonical_basis(kernel, size)
            if len(basis) != dims[(q, w)]:
                raise AssertionError(f"harmonic space of block {(q, w)} has the wrong dimension")
            harmonic[(q, w)] = [Form.from_vector(q, sp.block(q, w), v) for v in basis]
    return CohomologyTable(alg.n, hausdorff_dimension(alg), dims, harmonic)


@dataclass
class DualityReport:
    entries: list[tuple[int, int, int, int]]

    @property
    def mismatches(self) -> list[tuple[int, int, int, int]]:
        return [e for e in self.entries if e[2] != e[3]]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_duality(table: CohomologyTable, alg: CarnotAlgebra) -> DualityReport:
    """Compare dims(q, w) with dims(n-q, Q-w) over all blocks of either side."""
    n, Q = alg.n, hausdorff_dimension(alg)
    keys = set(table.dims) | {(n - q, Q - w) for q, w in table.dims}
    entries = [(q, w, table.dim(q, w), table.dim(n - q, Q - w)) for q, w in sorted(keys)]
    return DualityReport(entries)


def closed_one_forms(alg: CarnotAlgebra, maps: DifferentialMaps | None = None) -> list[Form]:
    maps = maps or ce_differential(alg)
    m = maps.matrix(1)
    kernel = linalg.nullspace(m, alg.n) if m else [
        [int(i == j) for j in range(alg.n)] for i in range(alg.n)]
    basis = linalg.canonical_basis(kernel, alg.n)
    return [Form.from_vector(1, maps.space.basis(1), v) for v in basis]

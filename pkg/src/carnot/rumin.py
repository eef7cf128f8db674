"""Algebraic Rumin decomposition of left-invariant forms.

Each block Lambda^{q,w} is split as E + im(d0) + F with E the harmonic forms
and F = im(delta0). The partial inverse of d0 kills E + F and maps im(d0)
back onto F; the retraction ``R = 1 - d0 dinv - dinv d0`` is iterated until
stationary to give the projector ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .algebra import CarnotAlgebra
from .cohomology import CohomologyTable, compute_cohomology
from .errors import CarnotError
from .exterior import DifferentialMaps, ce_differential

Block = tuple[int, int]


class RuminError(CarnotError, RuntimeError):
    """Iterates of the retraction failed to stabilize."""


@dataclass
class RuminData:
    alg: CarnotAlgebra
    maps: DifferentialMaps
    E: dict[Block, list[list[Fraction]]] = field(default_factory=dict)
    F: dict[Block, list[list[Fraction]]] = field(default_factory=dict)
    image: dict[Block, list[list[Fraction]]] = field(default_factory=dict)
    # dinv[(q, w)]: Lambda^{q+1,w} -> Lambda^{q,w}
    dinv: dict[Block, linalg.Matrix] = field(default_factory=dict)
    R: dict[Block, linalg.Matrix] = field(default_factory=dict)
    p: dict[Block, linalg.Matrix] = field(default_factory=dict)
    pi: dict[Block, linalg.Matrix] = field(default_factory=dict)
    iterations: int = 0

    @property
    def space(self):
        return self.maps.space

    def degree_dims(self, which: str) -> list[int]:
        store = {"E": self.E, "F": self.F, "im": self.image}[which]
        out = [0] * (self.alg.n + 1)
        for (q, _), vs in store.items():
            out[q] += len(vs)
        return out

    def full(self, which: str, q: int) -> linalg.Matrix:
        """Assemble the whole-degree matrix of ``R``, ``p`` or ``pi`` on Lambda^q."""
        store = {"R": self.R, "p": self.p, "pi": self.pi}[which]
        sp = self.space
        size = sp.dim(q)
        index = sp.index(q)
        m = linalg.zeros(size, size)
        for w in sp.weights(q):
            pos = [index[idx] for idx in sp.block(q, w)]
            blk = store[(q, w)]
            for a, i in enumerate(pos):
                for b, j in enumerate(pos):
                    m[i][j] = blk[a][b]
        return m

    def summary(self) -> dict:
        return {"E": self.degree_dims("E"), "im_d0": self.degree_dims("im"),
                "F": self.degree_dims("F"), "iterations": self.iterations}


def _cols(vectors, dim) -> linalg.Matrix:
    return linalg.columns_to_matrix(vectors, dim)


def _block(maps: DifferentialMaps, q: int, w: int) -> linalg.Matrix:
    sp = maps.space
    if q < 0 or q >= maps.alg.n:
        return linalg.zeros(sp.dim(q + 1, w), sp.dim(q, w))
    return maps.block(q, w)


def build_rumin(alg: CarnotAlgebra, maps: DifferentialMaps | None = None,
                max_iterations: int = 50) -> RuminData:
    maps = maps or ce_differential(alg)
    sp = maps.space
    data = RuminData(alg, maps)
    blocks = [(q, w) for q in range(alg.n + 1) for w in sp.weights(q)]

    for q, w in blocks:
        size = sp.dim(q, w)
        out = _block(maps, q, w)
        inc = _block(maps, q - 1, w)
        stacked = out + linalg.transpose(inc, size) if sp.dim(q - 1, w) else list(out)
        data.E[(q, w)] = linalg.canonical_basis(linalg.nullspace(stacked, size), size)
        data.F[(q, w)] = linalg.canonical_basis(out, size) if out and size else []

    for q, w in blocks:
        size = sp.dim(q, w)
        inc = _block(maps, q - 1, w)
        prev_F = data.F.get((q - 1, w), [])
        data.image[(q, w)] = [linalg.matvec(inc, f) for f in prev_F]
        basis = data.E[(q, w)] + data.image[(q, w)] + data.F[(q, w)]
        if len(basis) != size or linalg.rank(basis) != size:
            raise AssertionError(f"E + im d0 + F is not a direct sum decomposition of {(q, w)}")
        change = _cols(basis, size)
        change_inv = linalg.inverse(change)
        e = len(data.E[(q, w)])
        keep_E = [[Fraction(int(a == b and a < e)) for b in range(size)] for a in range(size)]
        data.pi[(q, w)] = linalg.matmul(linalg.matmul(change, keep_E), change_inv)
        # dinv_{q-1}: Lambda^{q,w} -> Lambda^{q-1,w}; image basis vector k -> prev_F[k]
        lower = sp.dim(q - 1, w)
        if lower:
            target = linalg.zeros(lower, size)
            for k, f in enumerate(prev_F):
                for r in range(lower):
                    target[r][e + k] = f[r]
            data.dinv[(q - 1, w)] = linalg.matmul(target, change_inv, cols=size)

    for q, w in blocks:
        size = sp.dim(q, w)
        out = _block(maps, q, w)
        inc = _block(maps, q - 1, w)
        r = linalg.identity(size)
        if sp.dim(q - 1, w):
            r = linalg.sub(r, linalg.matmul(inc, data.dinv[(q - 1, w)], cols=size))
        if sp.dim(q + 1, w):
            r = linalg.sub(r, linalg.matmul(data.dinv[(q, w)], out, cols=size))
        data.R[(q, w)] = r

    iterations = 0
    for key, r in data.R.items():
        power, j = r, 1
        while True:
            nxt = linalg.matmul(power, r, cols=len(r))
            if nxt == power:
                break
            power, j = nxt, j + 1
            if j > max_iterations:
                raise RuminError(f"retraction on block {key} not stationary after {j} iterations")
        data.p[key] = power
        iterations = max(iterations, j)
    data.iterations = iterations
    return data


@dataclass
class RuminReport:
    checks: dict[str, bool]
    E_dims: list[int]
    betti: list[int]
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "E_dims": self.E_dims,
                "betti": self.betti, "failures": self.failures}


def script_E(data: RuminData, q: int, w: int) -> list[list[Fraction]]:
    """ker(dinv) intersected with ker(dinv o d0) on the block (q, w)."""
    sp = data.space
    size = sp.dim(q, w)
    rows = []
    if sp.dim(q - 1, w):
        rows += data.dinv[(q - 1, w)]
    if sp.dim(q + 1, w):
        rows += linalg.matmul(data.dinv[(q, w)], _block(data.maps, q, w), cols=size)
    return linalg.canonical_basis(linalg.nullspace(rows, size), size)


def verify_rumin_identities(data: RuminData, table: CohomologyTable | None = None) -> RuminReport:
    alg = data.alg
    sp = data.space
    table = table or compute_cohomology(alg, data.maps)
    checks = {name: True for name in (
        "projector", "image_is_script_E", "p_pi_identity_on_script_E", "dim_script_E_is_betti",
        "weight_filtration", "pseudo_inverse", "retraction_on_E", "d0_kills_script_E")}
    failures: list[str] = []

    def fail(name: str, where) -> None:
        checks[name] = False
        failures.append(f"{name} at {where}")

    script_dims = [0] * (alg.n + 1)
    for (q, w), p in data.p.items():
        size = len(p)
        if linalg.matmul(p, p, cols=size) != p:
            fail("projector", (q, w))
        sE = script_E(data, q, w)
        script_dims[q] += len(sE)
        image = linalg.column_basis(p, size)
        if not linalg.same_span(image, sE):
            fail("image_is_script_E", (q, w))
        pi = data.pi[(q, w)]
        for v in sE:
            if linalg.matvec(p, linalg.matvec(pi, v)) != v:
                fail("p_pi_identity_on_script_E", (q, w))
                break
        out = _block(data.maps, q, w)
        if sp.dim(q + 1, w) and any(any(linalg.matvec(out, v)) for v in sE):
            fail("d0_kills_script_E", (q, w))
        r = data.R[(q, w)]
        for v in data.E[(q, w)]:
            if linalg.matvec(r, v) != v:
                fail("retraction_on_E", (q, w))
        for v in data.image[(q, w)] + data.F[(q, w)]:
            if any(linalg.matvec(r, v)):
                fail("retraction_on_E", (q, w))
        if sp.dim(q + 1, w):
            dinv = data.dinv[(q, w)]
            if linalg.matmul(linalg.matmul(dinv, out, cols=size), dinv,
                             cols=sp.dim(q + 1, w)) != dinv:
                fail("pseudo_inverse", (q, w))
            for v in data.image.get((q + 1, w), []):
                if linalg.matvec(out, linalg.matvec(dinv, v)) != v:
                    fail("pseudo_inverse", (q, w))

    betti = table.betti
    for q in range(alg.n + 1):
        if script_dims[q] != betti[q]:
            fail("dim_script_E_is_betti", q)
        full_p = data.full("p", q)
        basis = sp.basis(q)
        for i, row in enumerate(full_p):
            wi = sp.weight(basis[i])
            for j, x in enumerate(row):
                if x and wi < sp.weight(basis[j]):
                    fail("weight_filtration", (q, basis[i], basis[j]))
    return RuminReport(checks, script_dims, betti, failures)

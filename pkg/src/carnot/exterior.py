"""Exact exterior algebra of the dual of a Carnot algebra.

Basis q-forms are strictly increasing index tuples ``(i1, ..., iq)`` standing
for ``theta^i1 ^ ... ^ theta^iq`` (0-based), enumerated lexicographically for
each degree. The weight of a monomial is the sum of the weights of its
indices. Monomials are declared orthonormal, so the adjoint of ``d0`` is the
transposed matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Mapping

from .algebra import CarnotAlgebra
from .errors import CapacityError

MAX_DIM = 12

MultiIndex = tuple[int, ...]


def sort_with_sign(seq: Iterable[int]) -> tuple[int, MultiIndex]:
    """Sort indices, returning the permutation sign (0 on a repeated index)."""
    items = list(seq)
    sign = 1
    # insertion sort keeps track of transpositions
    for a in range(1, len(items)):
        b = a
        while b > 0 and items[b - 1] > items[b]:
            items[b - 1], items[b] = items[b], items[b - 1]
            sign = -sign
            b -= 1
    for a in range(1, len(items)):
        if items[a] == items[a - 1]:
            return 0, tuple(items)
    return sign, tuple(items)


@dataclass(frozen=True)
class Form:
    degree: int
    coeffs: Mapping[MultiIndex, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, c in self.coeffs.items():
            if len(idx) != self.degree:
                raise ValueError(f"index {idx} does not have degree {self.degree}")
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"index {idx} is not strictly increasing")
            if c:
                clean[tuple(idx)] = Fraction(c)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def monomial(cls, *indices: int, coeff=1) -> "Form":
        """``coeff * theta^indices[0] ^ ...``; indices need not be sorted."""
        sign, idx = sort_with_sign(indices)
        return cls(len(indices), {idx: sign * Fraction(coeff)} if sign else {})

    @classmethod
    def one(cls) -> "Form":
        return cls(0, {(): Fraction(1)})

    @classmethod
    def zero(cls, degree: int) -> "Form":
        return cls(degree, {})

    @classmethod
    def from_vector(cls, degree: int, basis: list[MultiIndex], vector) -> "Form":
        return cls(degree, {idx: c for idx, c in zip(basis, vector) if c})

    def to_vector(self, basis: list[MultiIndex]) -> list[Fraction]:
        return [self.coeffs.get(idx, Fraction(0)) for idx in basis]

    def __add__(self, other: "Form") -> "Form":
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = out.get(idx, 0) + c
        return Form(self.degree, out)

    def __neg__(self) -> "Form":
        return Form(self.degree, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, scalar) -> "Form":
        s = Fraction(scalar)
        return Form(self.degree, {i: s * c for i, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def weights(self, alg: CarnotAlgebra) -> set[int]:
        w = alg.weights
        return {sum(w[i] for i in idx) for idx in self.coeffs}

    def pretty(self, labels=None) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for idx, c in sorted(self.coeffs.items()):
            name = "^".join(f"th{i + 1}" if labels is None else f"d{labels[i]}" for i in idx) or "1"
            terms.append(f"{c}*{name}")
        return " + ".join(terms)


def theta(i: int) -> Form:
    return Form.monomial(i)


def wedge(a: Form, b: Form) -> Form:
    out: dict[MultiIndex, Fraction] = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            sign, idx = sort_with_sign(ia + ib)
            if sign:
                out[idx] = out.get(idx, 0) + sign * ca * cb
    return Form(a.degree + b.degree, out)


class FormSpace:
    """Indexed bases of the spaces of q-forms, split by weight."""

    def __init__(self, alg: CarnotAlgebra):
        if alg.n > MAX_DIM:
            raise CapacityError(f"dimension {alg.n} exceeds the supported maximum {MAX_DIM}")
        self.alg = alg
        self.n = alg.n
        self._w = alg.weights
        self._basis = [list(combinations(range(self.n), q)) for q in range(self.n + 1)]
        self._index = [{idx: pos for pos, idx in enumerate(b)} for b in self._basis]

    def basis(self, q: int) -> list[MultiIndex]:
        if not 0 <= q <= self.n:
            return []
        return self._basis[q]

    def index(self, q: int) -> dict[MultiIndex, int]:
        return self._index[q]

    def weight(self, idx: MultiIndex) -> int:
        return sum(self._w[i] for i in idx)

    @cached_property
    def _blocks(self) -> dict[tuple[int, int], list[MultiIndex]]:
        blocks: dict[tuple[int, int], list[MultiIndex]] = {}
        for q, b in enumerate(self._basis):
            for idx in b:
                blocks.setdefault((q, self.weight(idx)), []).append(idx)
        return blocks

    def block(self, q: int, w: int) -> list[MultiIndex]:
        return self._blocks.get((q, w), [])

    def weights(self, q: int) -> list[int]:
        return sorted(w for (qq, w) in self._blocks if qq == q)

    def dim(self, q: int, w: int | None = None) -> int:
        if w is None:
            return comb(self.n, q) if 0 <= q <= self.n else 0
        return len(self.block(q, w))

    def dims_table(self) -> dict[tuple[int, int], int]:
        return {key: len(v) for key, v in sorted(self._blocks.items())}


def _dtheta_table(alg: CarnotAlgebra) -> list[list[tuple[int, int, Fraction]]]:
    # d0 theta^k = - sum_{i<j} c_ij^k theta^i ^ theta^j
    table: list[list[tuple[int, int, Fraction]]] = [[] for _ in range(alg.n)]
    for (i, j), coeffs in alg.brackets.items():
        for k, c in coeffs.items():
            table[k].append((i, j, -c))
    return table


def d0_monomial(dtheta, idx: MultiIndex) -> dict[MultiIndex, Fraction]:
    """Antiderivation: sum_p (-1)^p theta^i1 ^ .. ^ d theta^ip ^ .. ."""
    out: dict[MultiIndex, Fraction] = {}
    for p, k in enumerate(idx):
        if not dtheta[k]:
            continue
        head, tail = idx[:p], idx[p + 1:]
        outer = -1 if p % 2 else 1
        for i, j, c in dtheta[k]:
            sign, new = sort_with_sign(head + (i, j) + tail)
            if sign:
                out[new] = out.get(new, 0) + outer * sign * c
    return {k: v for k, v in out.items() if v}


def d0(alg: CarnotAlgebra, form: Form) -> Form:
    dtheta = _dtheta_table(alg)
    out: dict[MultiIndex, Fraction] = {}
    for idx, c in form.coeffs.items():
        for new, v in d0_monomial(dtheta, idx).items():
            out[new] = out.get(new, 0) + c * v
    return Form(form.degree + 1, out)


class DifferentialMaps:
    """Matrices of d0 (and its adjoint) in the monomial bases.

    ``columns[q][j]`` is the sparse image of the j-th basis q-form. When the
    bracket table is graded, ``block(q, w)`` gives the dense matrix of
    ``d0: Lambda^{q,w} -> Lambda^{q+1,w}``.
    """

    def __init__(self, alg: CarnotAlgebra, space: FormSpace | None = None):
        self.alg = alg
        self.space = space or FormSpace(alg)
        sp = self.space
        dtheta = _dtheta_table(alg)
        self.columns: list[list[dict[int, Fraction]]] = []
        self.homogeneous = True
        for q in range(alg.n + 1):
            target = sp.index(q + 1) if q < alg.n else {}
            cols = []
            for idx in sp.basis(q):
                image = d0_monomial(dtheta, idx)
                w = sp.weight(idx)
                if any(sp.weight(new) != w for new in image):
                    self.homogeneous = False
                cols.append({target[new]: v for new, v in image.items()})
            self.columns.append(cols)
        self._blocks: dict[tuple[int, int], list[list[Fraction]]] = {}

    def matrix(self, q: int) -> list[list[Fraction]]:
        """Dense matrix of d0: Lambda^q -> Lambda^{q+1}."""
        sp = self.space
        rows = sp.dim(q + 1)
        cols = sp.dim(q)
        m = [[Fraction(0)] * cols for _ in range(rows)]
        if 0 <= q <= self.alg.n:
            for j, col in enumerate(self.columns[q]):
                for i, v in col.items():
                    m[i][j] = v
        return m

    def adjoint(self, q: int) -> list[list[Fraction]]:
        """Dense matrix of delta0: Lambda^{q+1} -> Lambda^q."""
        m = self.matrix(q)
        return [list(c) for c in zip(*m)] if m else [[] for _ in range(self.space.dim(q + 1))]

    def block(self, q: int, w: int) -> list[list[Fraction]]:
        """Dense matrix of d0: Lambda^{q,w} -> Lambda^{q+1,w} (rows x cols)."""
        if not self.homogeneous:
            raise ValueError("d0 is not weight-homogeneous for this bracket table")
        key = (q, w)
        if key not in self._blocks:
            sp = self.space
            src = sp.block(q, w)
            dst = sp.block(q + 1, w)
            dst_pos = {sp.index(q + 1)[idx]: r for r, idx in enumerate(dst)}
            m = [[Fraction(0)] * len(src) for _ in range(len(dst))]
            if 0 <= q <= self.alg.n:
                src_index = sp.index(q)
                for c, idx in enumerate(src):
                    for i, v in self.columns[q][src_index[idx]].items():
                        m[dst_pos[i]][c] = v
            self._blocks[key] = m
        return self._blocks[key]

    def apply(self, form: Form) -> Form:
        q = form.degree
        sp = self.space
        basis = sp.basis(q + 1)
        index = sp.index(q)
        out: dict[MultiIndex, Fraction] = {}
        for idx, c in form.coeffs.items():
            for i, v in self.columns[q][index[idx]].items():
                out[basis[i]] = out.get(basis[i], 0) + c * v
        return Form(q + 1, out)

    def apply_adjoint(self, form: Form) -> Form:
        """delta0 of a (q+1)-form, as the transpose of d0."""
        q = form.degree - 1
        if q < 0:
            return Form.zero(0)
        sp = self.space
        src, upper = sp.basis(q), sp.basis(q + 1)
        out: dict[MultiIndex, Fraction] = {}
        for j, col in enumerate(self.columns[q]):
            s = sum((v * form.coeffs.get(upper[i], 0) for i, v in col.items()), Fraction(0))
            if s:
                out[src[j]] = s
        return Form(q, out)

    def square_is_zero(self) -> bool:
        """Whether d0 o d0 vanishes in every degree."""
        for q in range(self.alg.n - 1):
            nxt = self.columns[q + 1]
            for col in self.columns[q]:
                acc: dict[int, Fraction] = {}
                for i, v in col.items():
                    for k, u in nxt[i].items():
                        acc[k] = acc.get(k, 0) + v * u
                if any(acc.values()):
                    return False
        return True


def ce_differential(alg: CarnotAlgebra, check: bool = True) -> DifferentialMaps:
    """Chevalley-Eilenberg differential, with the convention d theta(X,Y) = -theta([X,Y])."""
    maps = DifferentialMaps(alg)
    if check:
        if not maps.homogeneous:
            raise AssertionError("d0 is not weight-homogeneous: bracket table is not graded")
        if not maps.square_is_zero():
            raise AssertionError("d0 o d0 != 0: bracket table violates the Jacobi identity")
    return maps


def hodge_star(alg: CarnotAlgebra, f: Form) -> Form:
    """Hodge star for the orthonormal monomial basis, oriented by theta^1 ^ ... ^ theta^n."""
    n = alg.n
    out: dict[MultiIndex, Fraction] = {}
    full = set(range(n))
    for idx, c in f.coeffs.items():
        comp = tuple(sorted(full - set(idx)))
        sign, _ = sort_with_sign(idx + comp)
        out[comp] = out.get(comp, 0) + sign * c
    return Form(n - f.degree, out)


def volume_form(alg: CarnotAlgebra) -> Form:
    return Form(alg.n, {tuple(range(alg.n)): Fraction(1)})

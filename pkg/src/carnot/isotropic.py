"""Isotropic and regular horizontal subspaces.

The contact-type form is the full annihilator of V1, i.e. the duals of every
basis vector of weight >= 2, so ``d0 theta^a`` restricted to V1 is
``-c_ij^a``. For step >= 3 those restrictions vanish for the higher strata
and regularity (in this invariant sense) cannot hold; results are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from . import linalg
from .algebra import CarnotAlgebra, hausdorff_dimension
from .cohomology import CohomologyTable, compute_cohomology

SAMPLE_LOW, SAMPLE_HIGH = -5, 5


@dataclass(frozen=True)
class HorizontalSubspace:
    """Span of k vectors of V1, given in stratum-1 coordinates."""

    basis: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        basis = tuple(tuple(Fraction(x) for x in v) for v in self.basis)
        if basis and len({len(v) for v in basis}) != 1:
            raise ValueError("basis vectors must have equal length")
        if basis and linalg.rank([list(v) for v in basis]) != len(basis):
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", basis)

    @property
    def k(self) -> int:
        return len(self.basis)

    @classmethod
    def coordinate(cls, h: int, *indices: int) -> "HorizontalSubspace":
        return cls(tuple(tuple(int(i == j) for j in range(h)) for i in indices))

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in v] for v in self.basis]


@dataclass(frozen=True)
class ThetaData:
    """Restrictions to V1 x V1 of ``d0 theta^a`` for every a outside V1."""

    h: int
    forms: tuple[tuple[tuple[Fraction, ...], ...], ...]
    step: int = 2

    @property
    def codim(self) -> int:
        return len(self.forms)


def theta_data(alg: CarnotAlgebra) -> ThetaData:
    h = alg.h
    outside = range(h, alg.n)
    forms = []
    for a in outside:
        m = [[Fraction(0)] * h for _ in range(h)]
        for i in range(h):
            for j in range(h):
                c = alg.bracket(i, j).get(a)
                if c:
                    m[i][j] = -c
        forms.append(tuple(tuple(row) for row in m))
    return ThetaData(h, tuple(forms), alg.step)


def _pair(form, u, v) -> Fraction:
    return sum((u[i] * form[i][j] * v[j] for i in range(len(u)) if u[i]
                for j in range(len(v)) if v[j] and form[i][j]), Fraction(0))


def is_isotropic(theta: ThetaData, S: HorizontalSubspace) -> bool:
    for form in theta.forms:
        for a, s in enumerate(S.basis):
            for t in S.basis[a + 1:]:
                if _pair(form, s, t):
                    return False
    return True


def regularity_matrix(theta: ThetaData, S: HorizontalSubspace) -> list[list[Fraction]]:
    """Rows X = e_i of V1, columns (s_j, a): d0 theta^a(e_i, s_j)."""
    rows = []
    for i in range(theta.h):
        row = []
        for s in S.basis:
            for form in theta.forms:
                row.append(sum((form[i][j] * s[j] for j in range(theta.h) if s[j]), Fraction(0)))
        rows.append(row)
    return rows


def is_regular(theta: ThetaData, S: HorizontalSubspace) -> bool:
    need = S.k * theta.codim
    if need == 0:
        return True
    return linalg.rank(regularity_matrix(theta, S)) == need


def dimension_check(h: int, n: int, k: int) -> bool:
    return h - k >= (n - h) * k


def model_form(L: Sequence, k: int, h: int, codim: int) -> ThetaData:
    """Block 2-form making R^k (the first k coordinates) regular isotropic.

    ``L[p][j]`` is a length-``codim`` vector for ``p < h - k`` and ``j < k``;
    the induced map R^{h-k} -> Hom(R^k, R^codim) must be onto.
    """
    if len(L) != h - k or any(len(row) != k for row in L) or any(
            len(entry) != codim for row in L for entry in row):
        raise ValueError(f"L must have shape ({h - k}, {k}, {codim})")
    induced = [[Fraction(L[p][j][a]) for j in range(k) for a in range(codim)] for p in range(h - k)]
    if k * codim and (not induced or linalg.rank(induced) < k * codim):
        raise ValueError("L does not induce a surjection onto Hom(R^k, R^codim)")
    forms = []
    for a in range(codim):
        m = [[Fraction(0)] * h for _ in range(h)]
        for p in range(h - k):
            for j in range(k):
                m[k + p][j] = Fraction(L[p][j][a])
                m[j][k + p] = -Fraction(L[p][j][a])
        forms.append(tuple(tuple(row) for row in m))
    return ThetaData(h, tuple(forms))


@dataclass
class SearchResult:
    plane: HorizontalSubspace | None
    transcript: list[tuple[tuple[int, ...], ...]] = field(default_factory=list)
    trials: int = 0
    seed: int = 0
    invariant_level_only: bool = False

    @property
    def found(self) -> bool:
        return self.plane is not None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "plane": self.plane.to_json() if self.plane else None,
            "trials": self.trials,
            "seed": self.seed,
            "invariant_level_only": self.invariant_level_only,
        }


def _integer_basis(vectors) -> list[list[int]]:
    out = []
    for v in vectors:
        den = lcm(*(Fraction(x).denominator for x in v))
        out.append([int(Fraction(x) * den) for x in v])
    return out


def _commutant(theta: ThetaData, chosen: list[list[int]]) -> list[list[int]]:
    rows = [[sum(s[i] * form[i][j] for i in range(theta.h)) for j in range(theta.h)]
            for s in chosen for form in theta.forms]
    if not rows:
        return [[int(i == j) for j in range(theta.h)] for i in range(theta.h)]
    return _integer_basis(linalg.nullspace(rows, theta.h))


def search_regular_isotropic(theta: ThetaData, k: int, trials: int = 100, seed: int = 0,
                             resample: int = 10, step: int | None = None) -> SearchResult:
    """Sample k-planes and return the first regular isotropic one.

    Each new vector is a combination, with independent uniform integer
    coefficients in [-5, 5], of an integer basis of the vectors commuting with
    those already chosen (for the first vector this is the coordinate basis).
    A vector dependent on the previous ones is redrawn up to ``resample`` times.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    result = SearchResult(None, seed=seed,
                          invariant_level_only=(step if step is not None else theta.step) >= 3)
    for _ in range(trials):
        result.trials += 1
        chosen: list[list[int]] = []
        for _ in range(k):
            candidates = _commutant(theta, chosen)
            v = None
            for _ in range(resample):
                coeffs = rng.integers(SAMPLE_LOW, SAMPLE_HIGH + 1, size=len(candidates))
                trial = [int(sum(int(c) * b[i] for c, b in zip(coeffs, candidates)))
                         for i in range(theta.h)]
                if linalg.rank(chosen + [trial]) == len(chosen) + 1:
                    v = trial
                    break
            if v is None:
                break
            chosen.append(v)
        result.transcript.append(tuple(tuple(v) for v in chosen))
        if len(chosen) < k:
            continue
        plane = HorizontalSubspace(tuple(tuple(v) for v in chosen))
        if is_isotropic(theta, plane) and is_regular(theta, plane):
            result.plane = plane
            return result
    return result


def random_search(alg: CarnotAlgebra, k: int, trials: int = 100,
                  seed: int = 0) -> HorizontalSubspace | None:
    return search_regular_isotropic(theta_data(alg), k, trials, seed, step=alg.step).plane


@dataclass
class WeightVanishingReport:
    k: int
    checked: list[tuple[int, int, int]]

    @property
    def violations(self) -> list[tuple[int, int, int]]:
        return [c for c in self.checked if c[2]]

    @property
    def ok(self) -> bool:
        return not self.violations


def cross_check_weight_vanishing(alg: CarnotAlgebra, S: HorizontalSubspace,
                                 table: CohomologyTable | None = None) -> WeightVanishingReport:
    """H^{k,w} = 0 for w >= k+1 and H^{n-k,w} = 0 for w < Q-k."""
    theta = theta_data(alg)
    if not (is_isotropic(theta, S) and is_regular(theta, S)):
        raise ValueError("subspace is not regular isotropic")
    table = table or compute_cohomology(alg)
    n, Q, k = alg.n, hausdorff_dimension(alg), S.k
    checked = [(k, w, table.dim(k, w)) for w in range(k + 1, Q + 1)]
    checked += [(n - k, w, table.dim(n - k, w)) for w in range(0, Q - k)]
    return WeightVanishingReport(k, checked)

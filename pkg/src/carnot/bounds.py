"""Upper and lower bounds on the Hoelder equivalence exponent of a Carnot group."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .algebra import CarnotAlgebra, format_rational, hausdorff_dimension
from .cohomology import CohomologyTable, compute_cohomology
from .isotropic import (HorizontalSubspace, SearchResult, dimension_check, is_isotropic,
                        is_regular, search_regular_isotropic, theta_data)

CITES = {
    "lower": "ball-box comparison: identity is C^(1/r) (Chow-Rashevski)",
    "trivial_dim": "Hausdorff dimension comparison, alpha <= n/Q",
    "isoperimetric": "isoperimetric inequality, alpha <= (n-1)/(Q-1)",
    "weight": "vanishing of low-weight cohomology in degree q, alpha <= q/W_q",
    "richness": "regular isotropic k-planes, alpha <= (n-k)/(Q-k)",
}


@dataclass(frozen=True)
class UpperBound:
    value: Fraction
    rule: str
    cite: str
    q: int | None = None
    k: int | None = None

    def to_json(self) -> dict:
        d = {"value": format_rational(self.value), "rule": self.rule, "cite": self.cite}
        if self.q is not None:
            d["q"] = self.q
        if self.k is not None:
            d["k"] = self.k
        return d


@dataclass
class BoundsReport:
    n: int
    Q: int
    r: int
    lower: Fraction
    uppers: list[UpperBound]
    W_alg: dict[int, int | None] = field(default_factory=dict)

    @property
    def best_upper(self) -> Fraction:
        return min(u.value for u in self.uppers)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "Q": self.Q,
            "r": self.r,
            "lower": format_rational(self.lower),
            "lower_cite": CITES["lower"],
            "uppers": [u.to_json() for u in self.uppers],
            "best_upper": format_rational(self.best_upper),
            "W_alg": {str(q): w for q, w in sorted(self.W_alg.items())},
            "W_alg_note": "lower-bound certificates for W_q, not W_q itself",
        }


def weight_invariant_lower(table: CohomologyTable, q: int) -> int | None:
    """Smallest weight carrying degree-q cohomology (None if H^q = 0).

    All H^{q,w'} with w' below it vanish, which certifies W_q >= this value.
    """
    weights = table.weights(q)
    return weights[0] if weights else None


def _verified_k(alg: CarnotAlgebra, planes: Iterable) -> list[int]:
    theta = theta_data(alg)
    ks = set()
    for item in planes:
        plane = item.plane if isinstance(item, SearchResult) else item
        if plane is None:
            continue
        if not isinstance(plane, HorizontalSubspace):
            raise TypeError(f"expected a HorizontalSubspace, got {type(plane).__name__}")
        if not (is_isotropic(theta, plane) and is_regular(theta, plane)):
            raise ValueError(f"{plane.k}-plane is not regular isotropic")
        ks.add(plane.k)
    return sorted(ks)


def holder_report(alg: CarnotAlgebra, table: CohomologyTable | None = None,
                  isotropic_results: Iterable = ()) -> BoundsReport:
    """Collect every bound; richness bounds only for verified regular isotropic planes."""
    table = table or compute_cohomology(alg)
    n, Q, r = alg.n, hausdorff_dimension(alg), alg.step
    uppers = [UpperBound(Fraction(n, Q), "trivial_dim", CITES["trivial_dim"])]
    if Q > 1:
        uppers.append(UpperBound(Fraction(n - 1, Q - 1), "isoperimetric", CITES["isoperimetric"]))
    w_alg: dict[int, int | None] = {}
    for q in range(1, n):
        w = weight_invariant_lower(table, q)
        w_alg[q] = w
        if w:
            uppers.append(UpperBound(Fraction(q, w), "weight", CITES["weight"], q=q))
    for k in _verified_k(alg, isotropic_results):
        if k < n:
            uppers.append(UpperBound(Fraction(n - k, Q - k), "richness", CITES["richness"], k=k))
    return BoundsReport(n, Q, r, Fraction(1, r), uppers, w_alg)


def search_all_k(alg: CarnotAlgebra, trials: int = 100, seed: int = 0) -> list[SearchResult]:
    """Search regular isotropic k-planes for every k allowed by the dimension count."""
    theta = theta_data(alg)
    results = []
    for k in range(1, alg.h + 1):
        if not dimension_check(alg.h, alg.n, k):
            continue
        results.append(search_regular_isotropic(theta, k, trials, seed, step=alg.step))
    return results

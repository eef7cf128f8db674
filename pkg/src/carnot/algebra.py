"""Parsing, validation and construction of stratified nilpotent Lie algebras.

Two representations live here. :class:`AlgebraSpec` is a faithful transcription
of the JSON file format (1-based indices, upper-triangular bracket entries).
:class:`CarnotAlgebra` is the validated object every other module consumes; it
uses 0-based indices, with the basis ordered stratum by stratum so that the
weight of a basis vector is a function of its index.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from . import linalg
from .errors import GradingViolation, JacobiViolation, NotGenerated, SpecError

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")
_TOP_KEYS = {"name", "strata", "labels", "brackets"}
_ENTRY_KEYS = {"i", "j", "coeffs"}

Brackets = dict[tuple[int, int], dict[int, Fraction]]


def parse_rational(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise SpecError(f"coefficient must be a string 'p/q' or integer, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    m = _RATIONAL.match(text)
    if not m:
        raise SpecError(f"cannot parse rational {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise SpecError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class BracketEntry:
    i: int
    j: int
    coeffs: Mapping[int, Fraction]


@dataclass(frozen=True)
class AlgebraSpec:
    """Parsed algebra file. Indices are 1-based as written in the file."""

    name: str
    strata_dims: tuple[int, ...]
    brackets: tuple[BracketEntry, ...] = ()
    labels: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return sum(self.strata_dims)


def _require_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"{what} must be an integer, got {value!r}")
    return value


def parse_spec(text: str) -> AlgebraSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError("top-level JSON value must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SpecError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in ("name", "strata", "brackets"):
        if key not in doc:
            raise SpecError(f"missing field {key!r}")

    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise SpecError("name must be a non-empty string")
    strata = doc["strata"]
    if not isinstance(strata, list) or not strata:
        raise SpecError("strata must be a non-empty array of positive integers")
    strata_dims = tuple(_require_int(d, "stratum dimension") for d in strata)
    if any(d < 1 for d in strata_dims):
        raise SpecError("stratum dimensions must be positive")
    n = sum(strata_dims)

    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise SpecError("labels must be an array of strings")
        if len(labels) != n:
            raise SpecError(f"labels has length {len(labels)}, expected n = {n}")
        labels = tuple(labels)

    raw = doc["brackets"]
    if not isinstance(raw, list):
        raise SpecError("brackets must be an array")
    entries = []
    seen = set()
    for pos, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise SpecError(f"bracket entry #{pos} must be an object")
        unknown = set(entry) - _ENTRY_KEYS
        if unknown:
            raise SpecError(f"unknown field(s) in bracket entry #{pos}: {', '.join(sorted(unknown))}")
        if set(entry) != _ENTRY_KEYS:
            raise SpecError(f"bracket entry #{pos} needs keys i, j, coeffs")
        i = _require_int(entry["i"], "bracket index i")
        j = _require_int(entry["j"], "bracket index j")
        for idx in (i, j):
            if not 1 <= idx <= n:
                raise SpecError(f"index {idx} out of range 1..{n}")
        if i >= j:
            raise SpecError(f"bracket entry ({i},{j}): i must be < j")
        if (i, j) in seen:
            raise SpecError(f"duplicate bracket entry ({i},{j})")
        seen.add((i, j))
        coeffs_raw = entry["coeffs"]
        if not isinstance(coeffs_raw, dict):
            raise SpecError(f"coeffs of entry ({i},{j}) must be an object")
        coeffs = {}
        for key, value in coeffs_raw.items():
            try:
                k = int(key)
            except ValueError:
                raise SpecError(f"coefficient key {key!r} is not an index") from None
            if not 1 <= k <= n:
                raise SpecError(f"index {k} out of range 1..{n}")
            c = parse_rational(value)
            if c:
                coeffs[k] = c
        entries.append(BracketEntry(i, j, coeffs))
    return AlgebraSpec(name, strata_dims, tuple(entries), labels)


@dataclass(frozen=True, eq=True)
class CarnotAlgebra:
    """Validated stratified nilpotent Lie algebra (0-based indices).

    ``brackets`` holds ``[e_i, e_j]`` for ``i < j`` as sparse coefficient maps;
    use :meth:`bracket` for the antisymmetric closure.
    """

    name: str
    strata_dims: tuple[int, ...]
    brackets: Brackets = field(compare=True)
    labels: tuple[str, ...]

    @property
    def n(self) -> int:
        return sum(self.strata_dims)

    @property
    def step(self) -> int:
        return len(self.strata_dims)

    r = step

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(w + 1 for w, d in enumerate(self.strata_dims) for _ in range(d))

    @property
    def Q(self) -> int:
        return hausdorff_dimension(self)

    @property
    def h(self) -> int:
        """Dimension of the first stratum (the horizontal space)."""
        return self.strata_dims[0]

    def stratum(self, w: int) -> range:
        start = sum(self.strata_dims[: w - 1])
        return range(start, start + self.strata_dims[w - 1])

    def bracket(self, i: int, j: int) -> dict[int, Fraction]:
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def structure_constants(self) -> list[list[list[Fraction]]]:
        """Dense ``c[i][j][k]`` with ``[e_i, e_j] = sum_k c[i][j][k] e_k``."""
        n = self.n
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), coeffs in self.brackets.items():
            for k, v in coeffs.items():
                c[i][j][k] = v
                c[j][i][k] = -v
        return c

    def bracket_vectors(self, x, y) -> list[Fraction]:
        out = [Fraction(0)] * self.n
        for (i, j), coeffs in self.brackets.items():
            s = x[i] * y[j] - x[j] * y[i]
            if s:
                for k, v in coeffs.items():
                    out[k] += s * v
        return out


def _closure(n: int, brackets: Mapping) -> list[list[dict[int, Fraction]]]:
    table = [[{} for _ in range(n)] for _ in range(n)]
    for (i, j), coeffs in brackets.items():
        table[i][j] = dict(coeffs)
        table[j][i] = {k: -v for k, v in coeffs.items()}
    return table


def _bracket_sparse(table, x: Mapping[int, Fraction], k: int) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for a, xa in x.items():
        for b, c in table[a][k].items():
            out[b] = out.get(b, 0) + xa * c
    return {b: v for b, v in out.items() if v}


def jacobi_witness(n: int, brackets: Mapping) -> tuple[tuple[int, int, int], dict] | None:
    """First triple ``i < j < k`` (0-based) violating Jacobi, with its residual."""
    table = _closure(n, brackets)
    for i, j, k in combinations(range(n), 3):
        total: dict[int, Fraction] = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for idx, v in _bracket_sparse(table, table[a][b], c).items():
                total[idx] = total.get(idx, 0) + v
        residual = {idx: v for idx, v in total.items() if v}
        if residual:
            return (i, j, k), residual
    return None


def make_algebra(name: str, strata_dims, brackets: Mapping, labels=None,
                 check: bool = True) -> CarnotAlgebra:
    """Build a :class:`CarnotAlgebra` from 0-based brackets, validating by default.

    Entries may use either order ``(i, j)``; they are normalised to ``i < j``.
    ``check=False`` skips validation and is meant for deliberately broken
    fixtures only.
    """
    strata_dims = tuple(int(d) for d in strata_dims)
    n = sum(strata_dims)
    norm: Brackets = {}
    for (i, j), coeffs in brackets.items():
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        if i == j:
            continue
        row = norm.setdefault((i, j), {})
        for k, v in coeffs.items():
            row[k] = row.get(k, 0) + sign * Fraction(v)
    norm = {key: {k: v for k, v in row.items() if v} for key, row in norm.items()}
    norm = {key: row for key, row in sorted(norm.items()) if row}
    if labels is None:
        labels = tuple(f"e{i + 1}" for i in range(n))
    alg = CarnotAlgebra(name, strata_dims, norm, tuple(labels))
    if check:
        _check(alg)
    return alg


def _check(alg: CarnotAlgebra) -> None:
    n = alg.n
    witness = jacobi_witness(n, alg.brackets)
    if witness is not None:
        raise JacobiViolation(*witness)
    weights = alg.weights
    for (i, j), coeffs in alg.brackets.items():
        for k, v in sorted(coeffs.items()):
            if weights[k] != weights[i] + weights[j]:
                raise GradingViolation(i, j, k, v)
    for s in range(2, alg.step + 1):
        target = alg.stratum(s)
        rows = []
        for a in alg.stratum(1):
            for b in alg.stratum(s - 1):
                v = alg.bracket(a, b)
                rows.append([v.get(k, Fraction(0)) for k in target])
        rk = linalg.rank(rows) if rows else 0
        if rk < len(target):
            raise NotGenerated(s, rk, len(target))


def validate(spec: AlgebraSpec) -> CarnotAlgebra:
    brackets = {
        (e.i - 1, e.j - 1): {k - 1: v for k, v in e.coeffs.items()} for e in spec.brackets
    }
    return make_algebra(spec.name, spec.strata_dims, brackets, spec.labels)


def load(text: str) -> CarnotAlgebra:
    return validate(parse_spec(text))


def serialize(alg: CarnotAlgebra) -> str:
    doc = {
        "name": alg.name,
        "strata": list(alg.strata_dims),
        "labels": list(alg.labels),
        "brackets": [
            {"i": i + 1, "j": j + 1,
             "coeffs": {str(k + 1): format_rational(v) for k, v in sorted(coeffs.items())}}
            for (i, j), coeffs in sorted(alg.brackets.items())
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def hausdorff_dimension(alg: CarnotAlgebra) -> int:
    return sum(w * d for w, d in enumerate(alg.strata_dims, start=1))


# -- builtins ---------------------------------------------------------------

# quaternion units 1, i, j, k: _QMUL[a][b] = (sign, index) of e_a * e_b
_QMUL = [
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0)],
]


def _abelian(n: int) -> CarnotAlgebra:
    return make_algebra(f"abelian{n}", (n,), {})


def _heisenberg(m: int) -> CarnotAlgebra:
    z = 2 * m
    brackets = {(i, m + i): {z: 1} for i in range(m)}
    labels = [f"X{i + 1}" for i in range(m)] + [f"Y{i + 1}" for i in range(m)] + ["Z"]
    return make_algebra(f"heisenberg{m}", (2 * m, 1), brackets, labels)


def _quaternionic_heisenberg(m: int) -> CarnotAlgebra:
    # [X, Y] = Im(sum_l conj(x_l) y_l); V2 has basis (i, j, k)
    base = 4 * m
    brackets: dict = {}
    for block in range(m):
        for a in range(4):
            for b in range(a + 1, 4):
                conj = 1 if a == 0 else -1
                sign, unit = _QMUL[a][b]
                if unit == 0:
                    continue
                brackets[(4 * block + a, 4 * block + b)] = {base + unit - 1: conj * sign}
    units = ("1", "i", "j", "k")
    labels = [f"q{block + 1}{u}" for block in range(m) for u in units] + ["I", "J", "K"]
    return make_algebra(f"quaternionic_heisenberg{m}", (4 * m, 3), brackets, labels)


def _engel() -> CarnotAlgebra:
    return make_algebra("engel", (2, 1, 1), {(0, 1): {2: 1}, (0, 2): {3: 1}})


def _free_rank2_step3() -> CarnotAlgebra:
    return make_algebra(
        "free_rank2_step3", (2, 1, 2), {(0, 1): {2: 1}, (0, 2): {3: 1}, (1, 2): {4: 1}}
    )


BUILTIN_NAMES = ("abelian", "heisenberg", "quaternionic_heisenberg", "engel", "free_rank2_step3")


def builtin(name: str, m: int | None = None) -> CarnotAlgebra:
    """Named algebras; ``m`` is the dimension for ``abelian`` and the rank
    parameter for the Heisenberg families (default 1, or 3 for abelian)."""
    if name in ("abelian", "heisenberg", "quaternionic_heisenberg"):
        if m is None:
            m = 3 if name == "abelian" else 1
        if m < 1:
            raise ValueError(f"{name} needs m >= 1, got {m}")
        return {"abelian": _abelian, "heisenberg": _heisenberg,
                "quaternionic_heisenberg": _quaternionic_heisenberg}[name](m)
    if name == "engel":
        return _engel()
    if name == "free_rank2_step3":
        return _free_rank2_step3()
    raise ValueError(f"unknown builtin algebra {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def all_builtins(max_m: int = 2) -> list[CarnotAlgebra]:
    algs = [builtin("abelian", n) for n in (1, 2, 3, 4)]
    algs += [builtin("heisenberg", m) for m in range(1, max_m + 1)]
    algs += [builtin("quaternionic_heisenberg", 1), builtin("engel"), builtin("free_rank2_step3")]
    return algs


def random_step2(d1: int, d2: int, rng, low: int = -3, high: int = 3,
                 max_tries: int = 100) -> CarnotAlgebra:
    """Random step-2 algebra on strata ``(d1, d2)`` with integer constants.

    Jacobi holds automatically in step 2; samples are redrawn until
    ``[V1, V1]`` spans ``V2``.
    """
    if d2 > d1 * (d1 - 1) // 2:
        raise ValueError("V2 cannot be generated: d2 > C(d1, 2)")
    for _ in range(max_tries):
        brackets = {}
        for i, j in combinations(range(d1), 2):
            coeffs = {d1 + k: int(rng.integers(low, high + 1)) for k in range(d2)}
            brackets[(i, j)] = coeffs
        try:
            return make_algebra(f"random_{d1}_{d2}", (d1, d2), brackets)
        except NotGenerated:
            continue
    raise RuntimeError("could not sample a generated step-2 algebra")

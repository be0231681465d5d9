"""Solutions with all label spaces one-dimensional.

Every generator then carries a single complex number and each relation is an
equality of two monomials.  Solutions fall into three families: zero, a
closed-only family ``(a, b)`` and a full family ``(a, b, g)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

import numpy as np

from .errors import NotASolution
from .generators import GENERATORS, canonical_name

# Each relation as (lhs monomial, rhs monomial); a monomial lists generators
# with multiplicity.  Relations whose two sides are the same monomial hold
# for every assignment.
MONOMIALS: dict[int, tuple[tuple[str, ...], tuple[str, ...]]] = {
    1: (("mo", "no"), ("po",)),
    2: (("mo", "no"), ("po",)),
    3: (("do", "eo"), ("po",)),
    4: (("do", "eo"), ("po",)),
    5: (("eo", "mo"), ("eo", "mo")),
    6: (("mo", "mo"), ("mo", "mo")),
    7: (("do", "do"), ("do", "do")),
    8: (("mo", "do"), ("do", "mo")),
    9: (("do", "mo"), ("do", "mo")),
    10: (("po", "mo"), ("mo",)),
    11: (("po", "no"), ("no",)),
    12: (("do", "po"), ("do",)),
    13: (("eo", "po"), ("eo",)),
    14: (("mc", "nc"), ("pc",)),
    15: (("dc", "ec"), ("pc",)),
    16: (("mc", "mc"), ("mc", "mc")),
    17: (("dc", "dc"), ("dc", "dc")),
    18: (("mc", "dc"), ("dc", "mc")),
    19: (("dc", "mc"), ("dc", "mc")),
    20: (("mc",), ("mc",)),
    21: (("pc", "mc"), ("mc",)),
    22: (("pc", "nc"), ("nc",)),
    23: (("dc", "pc"), ("dc",)),
    24: (("ec", "pc"), ("ec",)),
    25: (("pc",), ("pc",)),
    26: (("mo", "eo", "dc", "nc", "i"), ("istar",)),
    27: (("do", "no", "mc", "ec", "istar"), ("i",)),
    28: (("mo", "i"), ("mo", "i")),
    29: (("mc", "i"), ("i", "i", "mo")),
    30: (("nc", "i"), ("no",)),
    31: (("i", "istar"), ("mo", "do")),
    32: (("dc", "mc"), ("mc", "dc")),
}


def _normalise(c: Mapping[str, complex]) -> dict[str, complex]:
    out = {canonical_name(k): complex(v) for k, v in c.items()}
    missing = [g for g in GENERATORS if g not in out]
    if missing:
        raise KeyError(f"scalar assignment lacks {missing}")
    return out


def _mono(c, gens):
    v = 1
    for g in gens:
        v = v * c[g]
    return v


def _residual(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def scalar_residuals(c: Mapping[str, complex]) -> dict[int, float]:
    c = _normalise(c)
    return {n: _residual(_mono(c, l), _mono(c, r)) for n, (l, r) in MONOMIALS.items()}


# -- the three families -----------------------------------------------------
@dataclass(frozen=True)
class Zero:
    def assignment(self) -> dict[str, complex]:
        return {g: 0j for g in GENERATORS}

    def to_json(self) -> dict:
        return {"family": "Zero", "params": []}


@dataclass(frozen=True)
class ClosedOnly:
    alpha: complex
    beta: complex

    def assignment(self) -> dict[str, complex]:
        a, b = complex(self.alpha), complex(self.beta)
        c = {g: 0j for g in GENERATORS}
        c.update(mc=1 / a, dc=1 / b, nc=a, ec=b, pc=1 + 0j)
        return c

    def to_json(self) -> dict:
        return {"family": "ClosedOnly", "params": _cjson([self.alpha, self.beta])}


@dataclass(frozen=True)
class Full:
    alpha: complex
    beta: complex
    gamma: complex

    def assignment(self) -> dict[str, complex]:
        a, b, g = complex(self.alpha), complex(self.beta), complex(self.gamma)
        return {"mo": 1 / a, "do": 1 / b, "no": a, "eo": b,
                "mc": 1 / (a * b * g), "dc": g / (a * b), "nc": a * b * g, "ec": a * b / g,
                "po": 1 + 0j, "pc": 1 + 0j, "i": 1 / (b * g), "istar": g / a}

    def to_json(self) -> dict:
        return {"family": "Full", "params": _cjson([self.alpha, self.beta, self.gamma])}


def _cjson(vals):
    return [[complex(v).real, complex(v).imag] for v in vals]


def classify_scalar(c: Mapping[str, complex], tol: float = 1e-12):
    """Family and parameters of a scalar solution; ``NotASolution`` otherwise."""
    c = _normalise(c)
    res = scalar_residuals(c)
    bad = [n for n, r in res.items() if r > tol]
    if bad:
        raise NotASolution(f"relations {bad} fail (worst residual {max(res[n] for n in bad):.3g})")
    scale = max(1.0, max(abs(v) for v in c.values()))
    small = tol * scale
    if all(abs(v) <= small for v in c.values()):
        return Zero()
    if abs(c["po"]) <= small:
        return ClosedOnly(c["nc"], c["ec"])
    return Full(c["no"], c["eo"], c["nc"] / (c["no"] * c["eo"]))


def random_family_members(rng: np.random.Generator, n: int) -> list:
    """``n`` draws from each non-zero family with parameters in the
    punctured complex plane."""
    def nz(k):
        z = rng.normal(size=k) + 1j * rng.normal(size=k)
        return [complex(v) if abs(v) > 1e-3 else 1.0 + 0j for v in z]

    out: list = []
    for _ in range(n):
        out.append(Full(*nz(3)))
        out.append(ClosedOnly(*nz(2)))
    return out


# -- exhaustive grid search ---------------------------------------------------
def grid_solutions(values=(-1, 0, 1, 2)) -> np.ndarray:
    """All assignments with entries in ``values`` satisfying every relation
    exactly, as an integer array with one row per solution (columns in
    generator order).  Integer arithmetic keeps the test exact."""
    vals = np.asarray(values, dtype=np.int64)
    idx = {g: j for j, g in enumerate(GENERATORS)}
    inner = 8
    grids = np.meshgrid(*([vals] * inner), indexing="ij")
    inner_cols = [g.reshape(-1) for g in grids]
    found = []
    for head in product(vals, repeat=len(GENERATORS) - inner):
        cols = [np.full_like(inner_cols[0], h) for h in head] + inner_cols
        c = {g: cols[idx[g]] for g in GENERATORS}
        ok = np.ones(inner_cols[0].shape, dtype=bool)
        for lhs, rhs in MONOMIALS.values():
            if sorted(lhs) == sorted(rhs):
                continue
            ok &= _mono(c, lhs) == _mono(c, rhs)
            if not ok.any():
                break
        if ok.any():
            found.append(np.stack([cols[j][ok] for j in range(len(GENERATORS))], axis=1))
    if not found:
        return np.zeros((0, len(GENERATORS)), dtype=np.int64)
    return np.concatenate(found)

"""Bundled Cardy algebras, each with retracts into concrete label spaces."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .cardy import CardyAlgebra, FrobeniusAlgebra, Retract, build_solution, identity_retract
from .errors import ParseError
from .evaluator import SewingSolution
from .tensor import LabelSpaces


# -- algebra constructors ---------------------------------------------------
def matrix_algebra(n: int) -> FrobeniusAlgebra:
    """``M_n`` in the matrix-unit basis ``E_ij -> i*n + j`` with trace counit."""
    d = n * n
    m = np.zeros((d, d, d))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                m[i * n + k, i * n + j, j * n + k] = 1.0
    eta = np.eye(n).reshape(-1)
    eps = np.eye(n).reshape(-1)
    return FrobeniusAlgebra.from_algebra(m, eta, eps)


def scalar_algebra(t: complex = 1.0) -> FrobeniusAlgebra:
    """``C`` with counit ``t``."""
    return FrobeniusAlgebra.from_algebra(np.ones((1, 1, 1)), np.ones(1), np.full(1, t))


def cyclic_group_algebra(n: int, scale: complex = 1.0) -> FrobeniusAlgebra:
    """``C[Z/n]`` with counit ``scale`` times the coefficient of the identity."""
    m = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            m[(a + b) % n, a, b] = 1.0
    eta = np.eye(n)[0]
    eps = scale * np.eye(n)[0]
    return FrobeniusAlgebra.from_algebra(m, eta, eps)


def idempotent_algebra(counits) -> FrobeniusAlgebra:
    """``C^k`` with orthogonal idempotent basis and the given counit values."""
    k = len(counits)
    m = np.zeros((k, k, k))
    for a in range(k):
        m[a, a, a] = 1.0
    return FrobeniusAlgebra.from_algebra(m, np.ones(k), np.asarray(counits, dtype=complex))


def direct_sum(A: FrobeniusAlgebra, B: FrobeniusAlgebra) -> FrobeniusAlgebra:
    a, b = A.dim, B.dim
    n = a + b
    m = np.zeros((n, n, n), dtype=complex)
    d = np.zeros((n, n, n), dtype=complex)
    m[:a, :a, :a], m[a:, a:, a:] = A.m, B.m
    d[:a, :a, :a], d[a:, a:, a:] = A.delta, B.delta
    return FrobeniusAlgebra(m, np.concatenate([A.eta, B.eta]), d, np.concatenate([A.eps, B.eps]))


# -- Cardy algebras -----------------------------------------------------------
def unit_cardy(t: complex = 1.0) -> CardyAlgebra:
    """``(C | C)``: open counit ``t``, closed counit ``t**2``."""
    return CardyAlgebra(scalar_algebra(t), scalar_algebra(t * t), np.ones((1, 1)))


def matrix_cardy(n: int) -> CardyAlgebra:
    """``(M_n | C)``: trace counit, unit closed counit, scalars as multiples of 1."""
    return CardyAlgebra(matrix_algebra(n), scalar_algebra(1.0), np.eye(n).reshape(-1, 1))


def group_cardy() -> CardyAlgebra:
    """``(C[Z/2] | C[Z/2])`` with the identity as closed-to-open map; the
    closed counit is half the open one."""
    return CardyAlgebra(cyclic_group_algebra(2), cyclic_group_algebra(2, 0.5), np.eye(2))


def matrix_plus_scalar_cardy() -> CardyAlgebra:
    """``(M_2 + C | C^2)``: the closed algebra is the centre, with the two
    central idempotents sent to the block units."""
    A_op = direct_sum(matrix_algebra(2), scalar_algebra(1.0))
    A_cl = idempotent_algebra([1.0, 1.0])
    iota = np.zeros((5, 2))
    iota[:4, 0] = np.eye(2).reshape(-1)
    iota[4, 1] = 1.0
    return CardyAlgebra(A_op, A_cl, iota)


def _generic_retract(ambient: int, dim: int, rng: np.random.Generator) -> Retract:
    """A non-orthogonal embedding with a left inverse."""
    e = rng.normal(size=(ambient, dim)) + 1j * rng.normal(size=(ambient, dim))
    w = rng.normal(size=(dim, ambient))
    r = np.linalg.solve(w @ e, w)
    return Retract(e, r)


@dataclass
class LibraryEntry:
    name: str
    description: str
    cardy: CardyAlgebra
    retract_op: Retract
    retract_cl: Retract
    labels: LabelSpaces

    def solution(self) -> SewingSolution:
        return build_solution(self.cardy, self.retract_op, self.retract_cl, self.labels)

    def to_json(self) -> dict:
        return {"name": self.name, "description": self.description,
                "cardy": self.cardy.to_json(), "retractOp": self.retract_op.to_json(),
                "retractCl": self.retract_cl.to_json(), "labelSpaces": self.labels.to_json()}

    @classmethod
    def from_json(cls, doc: dict) -> "LibraryEntry":
        try:
            return cls(doc["name"], doc.get("description", ""), CardyAlgebra.from_json(doc["cardy"]),
                       Retract.from_json(doc["retractOp"]), Retract.from_json(doc["retractCl"]),
                       LabelSpaces.from_json(doc["labelSpaces"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed library entry: {exc}") from None


def build_library(seed: int = 7) -> list[LibraryEntry]:
    rng = np.random.default_rng(seed)
    inc = np.zeros((5, 4))
    inc[:4, :4] = np.eye(4)
    entries = [
        LibraryEntry("unit", "(C | C) with open counit 1.5", unit_cardy(1.5),
                     identity_retract(1), identity_retract(1), LabelSpaces(1, 1, 1)),
        LibraryEntry("matrix2", "(M_2 | C) with trace counit", matrix_cardy(2),
                     identity_retract(4), identity_retract(1), LabelSpaces(4, 1, 1)),
        LibraryEntry("matrix3", "(M_3 | C) with trace counit", matrix_cardy(3),
                     identity_retract(9), identity_retract(1), LabelSpaces(9, 1, 1)),
        LibraryEntry("groupZ2", "(C[Z/2] | C[Z/2]) with identity closed-to-open map", group_cardy(),
                     identity_retract(2), identity_retract(2), LabelSpaces(2, 2, 1)),
        LibraryEntry("matrix2plusC", "(M_2 + C | C^2), closed algebra the centre",
                     matrix_plus_scalar_cardy(), identity_retract(5), identity_retract(2),
                     LabelSpaces(5, 2, 1)),
        LibraryEntry("matrix2-embedded", "(M_2 | C) inside B_op of dimension 5 and B_l x B_r of 2 x 2",
                     matrix_cardy(2), Retract(inc, inc.T), _generic_retract(4, 1, rng),
                     LabelSpaces(5, 2, 2)),
        LibraryEntry("groupZ2-embedded", "(C[Z/2] | C[Z/2]) through generic retracts into 3 and 2 x 2",
                     group_cardy(), _generic_retract(3, 2, rng), _generic_retract(4, 2, rng),
                     LabelSpaces(3, 2, 2)),
    ]
    return entries


def library_to_json(entries: list[LibraryEntry]) -> dict:
    return {"entries": [e.to_json() for e in entries]}


def library_from_json(doc: dict) -> list[LibraryEntry]:
    try:
        return [LibraryEntry.from_json(e) for e in doc["entries"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed library: {exc}") from None


@lru_cache(maxsize=None)
def _bundled() -> tuple[LibraryEntry, ...]:
    text = resources.files("sewing").joinpath("data/library.json").read_text()
    return tuple(library_from_json(json.loads(text)))


def load_library() -> list[LibraryEntry]:
    """The bundled example library (shipped as JSON)."""
    return list(_bundled())


@lru_cache(maxsize=None)
def _solutions() -> tuple[tuple[str, SewingSolution], ...]:
    return tuple((e.name, e.solution()) for e in _bundled())


def library_solutions() -> list[tuple[str, SewingSolution]]:
    return list(_solutions())

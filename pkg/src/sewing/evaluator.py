"""Bl in Vect and evaluation of decomposed world sheets.

Bl of a world sheet is the ord-ordered tensor product of its boundary labels
(``B_op`` per open boundary, ``B_l``/``B_r`` at the two slots of a closed one,
dual on in-boundaries).  Bl of a sewing contracts every sewn out/in pair and
then permutes the survivors into the target order.  Evaluating a
decomposition tensors together ``psi(alpha_i, f_alpha_i)`` and applies Bl of
its sewing and boundary matching.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    InvalidDecomposition,
    ParseError,
    SewingError,
    ShapeMismatch,
    TargetMismatch,
)
from .generators import GENERATORS, canonical_name, generator_signature, hom_shape_dims, port_keys
from .tensor import AxisLabel, LabelSpaces, Tensor, contract_network, hom_labels, psi, relative_residual
from .worldsheet import (
    CLOSED,
    IN,
    WorldSheetSignature,
    sew_with_map,
    signature_from_json,
    signature_to_json,
    tensor_with_maps,
)


# ---------------------------------------------------------------------------
# solutions
# ---------------------------------------------------------------------------
class SewingSolution:
    """Candidate correlators: one morphism tensor per generator."""

    def __init__(self, L: LabelSpaces, f: Mapping[str, object]):
        self.L = L
        tensors: dict[str, np.ndarray] = {}
        for name, t in f.items():
            tensors[canonical_name(name)] = np.array(getattr(t, "data", t), dtype=complex)
        missing = [g for g in GENERATORS if g not in tensors]
        if missing:
            raise ShapeMismatch(f"solution lacks tensors for {missing}")
        dims = L.as_dict()
        for g in GENERATORS:
            want = hom_shape_dims(g, dims)
            if tensors[g].shape != want:
                raise ShapeMismatch(f"f_{g} has shape {tensors[g].shape}, expected {want}")
        self.f = {g: tensors[g] for g in GENERATORS}

    def __getitem__(self, name: str) -> np.ndarray:
        return self.f[canonical_name(name)]

    def replace(self, **changes) -> "SewingSolution":
        f = dict(self.f)
        f.update({canonical_name(k): v for k, v in changes.items()})
        return SewingSolution(self.L, f)

    @classmethod
    def zeros(cls, L: LabelSpaces) -> "SewingSolution":
        dims = L.as_dict()
        return cls(L, {g: np.zeros(hom_shape_dims(g, dims), dtype=complex) for g in GENERATORS})

    @classmethod
    def from_scalars(cls, c: Mapping[str, complex]) -> "SewingSolution":
        L = LabelSpaces(1, 1, 1)
        dims = L.as_dict()
        return cls(L, {g: np.full(hom_shape_dims(g, dims), complex(c[g])) for g in GENERATORS})

    def scalars(self) -> dict[str, complex]:
        if (self.L.dim_op, self.L.dim_l, self.L.dim_r) != (1, 1, 1):
            raise ShapeMismatch("scalar view needs all label spaces one-dimensional")
        return {g: complex(self.f[g].reshape(-1)[0]) for g in GENERATORS}

    def to_json(self) -> dict:
        return {"labelSpaces": self.L.to_json(),
                "tensors": {g: Tensor(self.f[g], hom_labels(g)).to_json() for g in GENERATORS}}

    @classmethod
    def from_json(cls, doc: dict) -> "SewingSolution":
        try:
            L = LabelSpaces.from_json(doc["labelSpaces"])
            f = {k: Tensor.from_json(v).data for k, v in doc["tensors"].items()}
            return cls(L, f)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed solution: {exc}") from None
        except (ShapeMismatch, KeyError) as exc:
            raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# Bl on objects and sewing morphisms
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class BlSpace:
    labels: tuple[AxisLabel, ...]
    shape: tuple[int, ...]


def slot_labels(sig: WorldSheetSignature) -> dict[int, AxisLabel]:
    out = {}
    for b in sig.boundaries():
        dual = b.direction == IN
        if b.kind == CLOSED:
            out[b.ord_plus] = AxisLabel("Bl", dual)
            out[b.ord_minus] = AxisLabel("Br", dual)
        else:
            out[b.ord] = AxisLabel("Bop", dual)
    return out


def bl_space(sig: WorldSheetSignature, L: LabelSpaces) -> BlSpace:
    lab = slot_labels(sig)
    labels = tuple(lab[s] for s in sorted(lab))
    dims = L.as_dict()
    return BlSpace(labels, tuple(dims[l.space] for l in labels))


def _closed_slot_pairs(sig: WorldSheetSignature, a_key: int, b_key: int) -> list[tuple[int, int]]:
    a, b = sig.boundary(a_key), sig.boundary(b_key)
    return list(zip(a.slots, b.slots))


def _matching_slot_map(sewn: WorldSheetSignature, target: WorldSheetSignature,
                       key_map: Mapping[int, int] | None) -> dict[int, int]:
    """Boundary-level matching (sewn key -> target key) to a slot-level map."""
    if key_map is None:
        if sewn != target:
            raise InvalidDecomposition("sewn world sheet differs from the target; a boundary matching is required")
        return {s: s for b in sewn.boundaries() for s in b.slots}
    slot_map: dict[int, int] = {}
    try:
        for b in sewn.boundaries():
            t = target.boundary(key_map[b.key])
            if t.kind != b.kind or t.direction != b.direction or t.key != key_map[b.key]:
                raise InvalidDecomposition(f"matching sends {b} to incompatible {t}")
            slot_map.update(zip(b.slots, t.slots))
    except KeyError as exc:
        raise InvalidDecomposition(f"matching misses boundary {exc.args[0]}") from None
    except SewingError as exc:
        raise InvalidDecomposition(str(exc)) from None
    if sorted(slot_map.values()) != sorted(s for b in target.boundaries() for s in b.slots):
        raise InvalidDecomposition("matching is not a bijection onto the target boundaries")
    try:
        relabelled = sewn.relabel(slot_map)
    except SewingError as exc:
        raise InvalidDecomposition(f"matching is not a homeomorphism: {exc}") from None
    if relabelled != target:
        raise InvalidDecomposition("matching is not a homeomorphism onto the target")
    return slot_map


class BlMorphism:
    """Bl of a sewing followed by a boundary matching, as a linear map."""

    def __init__(self, sig: WorldSheetSignature, sewing, L: LabelSpaces,
                 target: WorldSheetSignature | None = None,
                 matching: Mapping[int, int] | None = None):
        sewn, smap = sew_with_map(sig, sewing)
        target = sewn if target is None else target
        tmap = _matching_slot_map(sewn, target, matching)
        self.source, self.target, self.L = sig, target, L
        label = {s: s for s in range(1, sig.n_slots + 1)}
        for a, b in sewing:
            for x, y in _closed_slot_pairs(sig, a, b):
                label[y] = x
        self._in = [label[s] for s in range(1, sig.n_slots + 1)]
        final = {tmap[smap[s]]: s for s in smap}
        self._out = [label[final[t]] for t in range(1, target.n_slots + 1)]

    def apply(self, v) -> Tensor:
        arr = np.asarray(getattr(v, "data", v), dtype=complex)
        want = bl_space(self.source, self.L).shape
        if arr.shape != want:
            raise ShapeMismatch(f"Bl vector of shape {arr.shape}, expected {want}")
        out = contract_network([arr], [self._in], self._out)
        return Tensor(out, bl_space(self.target, self.L).labels)


def bl_morphism(sig: WorldSheetSignature, sewing, L: LabelSpaces,
                target: WorldSheetSignature | None = None,
                matching: Mapping[int, int] | None = None) -> BlMorphism:
    return BlMorphism(sig, sewing, L, target, matching)


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------
PortRef = tuple[int, int]   # (factor index, local boundary index of the generator)


class Decomposition:
    """A world sheet presented as generators, a sewing and a boundary matching.

    ``sewing`` pairs ``(out_port, in_port)``; ``matching[k]`` is the surviving
    port that becomes the ``k``-th boundary of ``target`` (boundaries in ord
    order, closed ones after open ones).  Validated on construction.
    """

    __slots__ = ("target", "factors", "sewing", "matching", "_glob", "_slot_of")

    def __init__(self, factors: Sequence[str], sewing: Iterable[tuple[PortRef, PortRef]],
                 target: WorldSheetSignature | None = None,
                 matching: Sequence[PortRef] | None = None):
        self.factors = tuple(canonical_name(a) for a in factors)
        self.sewing = tuple((tuple(a), tuple(b)) for a, b in sewing)
        sigs = [generator_signature(a) for a in self.factors]
        whole, maps = tensor_with_maps(sigs)
        try:
            glob = {(i, j): maps[i][k] for i, a in enumerate(self.factors)
                    for j, k in enumerate(port_keys(a))}
            gsew = [(glob[a], glob[b]) for a, b in self.sewing]
        except KeyError as exc:
            raise InvalidDecomposition(f"unknown port {exc.args[0]}") from None
        try:
            sewn, smap = sew_with_map(whole, gsew)
        except SewingError as exc:
            raise InvalidDecomposition(f"invalid sewing: {exc}") from None
        survivors = {p: smap[k] for p, k in glob.items() if k in smap}
        if target is None:
            target = sewn
        if matching is None:
            if sewn != target:
                raise InvalidDecomposition("sewn world sheet differs from the target; give a matching")
            by_key = {v: p for p, v in survivors.items()}
            matching = [by_key[b.key] for b in target.boundaries()]
        matching = tuple(tuple(p) for p in matching)
        tb = target.boundaries()
        if len(matching) != len(tb) or sorted(matching) != sorted(survivors):
            raise InvalidDecomposition("matching must list every surviving boundary exactly once")
        key_map = {survivors[p]: b.key for p, b in zip(matching, tb)}
        _matching_slot_map(sewn, target, key_map)
        self.target = target
        self.matching = matching
        self._glob = glob
        self._slot_of = (whole, gsew, key_map)

    def __repr__(self):
        return f"Decomposition(factors={list(self.factors)}, sewing={list(self.sewing)}, matching={list(self.matching)})"

    def __eq__(self, other):
        return (isinstance(other, Decomposition) and self.factors == other.factors
                and set(self.sewing) == set(other.sewing) and self.matching == other.matching
                and self.target == other.target)

    def __hash__(self):
        return hash((self.factors, frozenset(self.sewing), self.matching))

    @property
    def source(self) -> WorldSheetSignature:
        return self._slot_of[0]

    def bl(self, L: LabelSpaces) -> BlMorphism:
        whole, gsew, key_map = self._slot_of
        return BlMorphism(whole, gsew, L, self.target, key_map)

    def network(self) -> tuple[list[list[int]], list[int]]:
        """Einsum labels per factor (Bl axis order) and for the output."""
        whole, gsew, key_map = self._slot_of
        label = {s: s for s in range(1, whole.n_slots + 1)}
        for a, b in gsew:
            for x, y in _closed_slot_pairs(whole, a, b):
                label[y] = x
        per_factor = []
        for i, a in enumerate(self.factors):
            labs = []
            for j in range(len(port_keys(a))):
                labs.extend(label[s] for s in whole.boundary(self._glob[(i, j)]).slots)
            per_factor.append(labs)
        tslot: dict[int, int] = {}
        for p, tb in zip(self.matching, self.target.boundaries()):
            src = whole.boundary(self._glob[p])
            for s, t in zip(src.slots, tb.slots):
                tslot[t] = label[s]
        out = [tslot[t] for t in range(1, self.target.n_slots + 1)]
        return per_factor, out

    def permute_factors(self, sigma: Sequence[int]) -> "Decomposition":
        """New factor ``k`` is old factor ``sigma[k]``."""
        sigma = list(sigma)
        if sorted(sigma) != list(range(len(self.factors))):
            from .errors import BadPermutation
            raise BadPermutation(f"{sigma} does not permute {len(self.factors)} factors")
        new_index = {old: new for new, old in enumerate(sigma)}

        def mv(p):
            return (new_index[p[0]], p[1])

        return Decomposition([self.factors[i] for i in sigma],
                             [(mv(a), mv(b)) for a, b in self.sewing],
                             self.target, [mv(p) for p in self.matching])

    def tensor(self, other: "Decomposition") -> "Decomposition":
        """Disjoint union, matched onto ``tensor(self.target, other.target)``."""
        from .worldsheet import tensor as ws_tensor
        n = len(self.factors)

        def sh(p):
            return (p[0] + n, p[1])

        target = ws_tensor(self.target, other.target)
        _, maps = tensor_with_maps([self.target, other.target])
        pos = {}
        for side, (d, m) in enumerate(((self, maps[0]), (other, maps[1]))):
            for p, b in zip(d.matching, d.target.boundaries()):
                pos[m[b.key]] = p if side == 0 else sh(p)
        matching = [pos[b.key] for b in target.boundaries()]
        return Decomposition(self.factors + other.factors,
                             list(self.sewing) + [(sh(a), sh(b)) for a, b in other.sewing],
                             target, matching)

    # -- JSON ------------------------------------------------------------
    def to_json(self) -> dict:
        def ref(p):
            return [p[0], port_keys(self.factors[p[0]])[p[1]]]
        return {"target": signature_to_json(self.target),
                "factors": list(self.factors),
                "sewing": [[ref(a), ref(b)] for a, b in self.sewing],
                "matching": [ref(p) for p in self.matching]}

    @classmethod
    def from_json(cls, doc: dict) -> "Decomposition":
        try:
            factors = [canonical_name(a) for a in doc["factors"]]

            def unref(r):
                i, k = int(r[0]), int(r[1])
                return (i, port_keys(factors[i]).index(k))

            sewing = [(unref(a), unref(b)) for a, b in doc.get("sewing", [])]
            target = signature_from_json(doc["target"]) if "target" in doc else None
            matching = [unref(r) for r in doc["matching"]] if "matching" in doc else None
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"malformed decomposition: {exc}") from None
        return cls(factors, sewing, target, matching)


def single(alpha: str) -> Decomposition:
    """The trivial decomposition ``(X_alpha, (alpha), id)``."""
    return Decomposition([alpha], [])


def evaluate(sol: SewingSolution, d: Decomposition, source_scale: complex = 1.0) -> Tensor:
    """``Bl(varpi) o (psi(alpha_1, f_1) x ... x psi(alpha_m, f_m))``.

    ``source_scale`` is the scalar ``U(varpi)^-1`` of a scalar-valued source
    functor; it is 1 for the trivial source functor."""
    labels, out = d.network()
    arrays = [psi(a, sol.f[a], sol.L).data for a in d.factors]
    data = contract_network(arrays, labels, out) * source_scale
    return Tensor(data, bl_space(d.target, sol.L).labels)


def evaluate_naive(sol: SewingSolution, d: Decomposition) -> Tensor:
    """Same as :func:`evaluate` but literally forms the tensor product first."""
    v = np.ones(())
    for a in d.factors:
        v = np.multiply.outer(v, psi(a, sol.f[a], sol.L).data)
    # factor-major axes -> ord order of the disjoint union (open slots first)
    _, maps = tensor_with_maps([generator_signature(a) for a in d.factors])
    dest = [maps[i][s] - 1 for i in range(len(d.factors)) for s in sorted(maps[i])]
    return d.bl(sol.L).apply(np.transpose(v, np.argsort(dest)))


@dataclass(frozen=True)
class IndependenceReport:
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict:
        return {"residual": self.residual, "tol": self.tol, "pass": self.passed}


def check_decomposition_independence(sol: SewingSolution, d1: Decomposition, d2: Decomposition,
                                     tol: float = 1e-9) -> IndependenceReport:
    if d1.target != d2.target:
        raise TargetMismatch("decompositions present different world sheets")
    return IndependenceReport(relative_residual(evaluate(sol, d1), evaluate(sol, d2)), tol)

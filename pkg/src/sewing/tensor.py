"""Dense complex tensors with labelled axes, over finite-dimensional vector
spaces with chosen (self-dual) bases."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadPermutation, DualityMismatch, ParseError, ShapeMismatch
from .generators import (
    bl_axis_source,
    bl_dims,
    canonical_name,
    generator_hom_shape,
    hom_shape_dims,
    inverse_permutation,
)

SPACES = ("Bop", "Bl", "Br")


@dataclass(frozen=True)
class AxisLabel:
    space: str
    dual: bool = False

    def __str__(self):
        return self.space + ("*" if self.dual else "")

    @classmethod
    def parse(cls, text: str) -> "AxisLabel":
        return cls(text[:-1], True) if text.endswith("*") else cls(text, False)


@dataclass(frozen=True)
class LabelSpaces:
    dim_op: int
    dim_l: int
    dim_r: int

    def __post_init__(self):
        for v in (self.dim_op, self.dim_l, self.dim_r):
            if int(v) != v or v < 1:
                raise ShapeMismatch(f"label space dimensions must be positive integers, got {v}")

    def as_dict(self) -> dict[str, int]:
        return {"Bop": self.dim_op, "Bl": self.dim_l, "Br": self.dim_r}

    @property
    def dim_cl(self) -> int:
        return self.dim_l * self.dim_r

    def to_json(self) -> dict:
        return {"dimOp": self.dim_op, "dimL": self.dim_l, "dimR": self.dim_r}

    @classmethod
    def from_json(cls, doc: dict) -> "LabelSpaces":
        try:
            return cls(int(doc["dimOp"]), int(doc["dimL"]), int(doc["dimR"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed label spaces: {exc}") from None


class Tensor:
    """Complex array plus optional axis labels."""

    __slots__ = ("data", "labels")

    def __init__(self, data, labels: Sequence[AxisLabel | str] | None = None):
        arr = np.asarray(data, dtype=complex)
        if labels is not None:
            labels = tuple(AxisLabel.parse(l) if isinstance(l, str) else l for l in labels)
            if len(labels) != arr.ndim:
                raise ShapeMismatch(f"{len(labels)} labels for a rank-{arr.ndim} tensor")
        self.data = arr
        self.labels = labels

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def rank(self) -> int:
        return self.data.ndim

    def __repr__(self):
        lab = "" if self.labels is None else " [" + ",".join(map(str, self.labels)) + "]"
        return f"Tensor(shape={self.shape}{lab})"

    def to_json(self) -> dict:
        flat = self.data.reshape(-1)
        doc = {"shape": list(self.shape),
               "re": [float(x) for x in flat.real],
               "im": [float(x) for x in flat.imag]}
        if self.labels is not None:
            doc["labels"] = [str(l) for l in self.labels]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Tensor":
        try:
            shape = tuple(int(s) for s in doc["shape"])
            re = np.asarray(doc["re"], dtype=float)
            im = np.asarray(doc.get("im", [0.0] * len(re)), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed tensor: {exc}") from None
        n = int(np.prod(shape)) if shape else 1
        if re.size != n or im.size != n:
            raise ParseError(f"tensor of shape {shape} needs {n} entries, got {re.size}/{im.size}")
        return cls((re + 1j * im).reshape(shape), doc.get("labels"))


def contract(t: Tensor, pairs: Iterable[tuple[int, int]]) -> Tensor:
    """Trace out each pair of axes; the remaining axes keep their order."""
    pairs = [tuple(p) for p in pairs]
    used = [a for p in pairs for a in p]
    if len(set(used)) != len(used) or any(not 0 <= a < t.rank for a in used):
        raise ShapeMismatch(f"bad contraction pairs {pairs} for rank {t.rank}")
    for a, b in pairs:
        if t.shape[a] != t.shape[b]:
            raise ShapeMismatch(f"axes {a} and {b} have dimensions {t.shape[a]} != {t.shape[b]}")
        if t.labels is not None:
            la, lb = t.labels[a], t.labels[b]
            if la.space != lb.space:
                raise ShapeMismatch(f"cannot pair {la} with {lb}")
            if la.dual == lb.dual:
                raise DualityMismatch(f"axes {a} and {b} are both {'dual' if la.dual else 'primal'}")
    sub = list(range(t.rank))
    for a, b in pairs:
        sub[b] = sub[a]
    keep = [i for i in range(t.rank) if i not in used]
    out = np.einsum(t.data, sub, [sub[i] for i in keep]) if pairs else t.data.copy()
    labels = None if t.labels is None else tuple(t.labels[i] for i in keep)
    return Tensor(out, labels)


def permute(t: Tensor, sigma: Sequence[int]) -> Tensor:
    """Axis ``i`` of the result is axis ``sigma[i]`` of ``t``."""
    sigma = [int(s) for s in sigma]
    if sorted(sigma) != list(range(t.rank)):
        raise BadPermutation(f"{sigma} is not a permutation of {t.rank} axes")
    labels = None if t.labels is None else tuple(t.labels[i] for i in sigma)
    return Tensor(np.transpose(t.data, sigma), labels)


def outer(*ts: Tensor) -> Tensor:
    data = np.ones(())
    labels: list[AxisLabel] | None = []
    for t in ts:
        data = np.multiply.outer(data, t.data)
        labels = None if labels is None or t.labels is None else labels + list(t.labels)
    return Tensor(data, labels)


def relative_residual(a, b) -> float:
    """``|a-b| / max(|a|,|b|)`` in Frobenius norm; 0 when both vanish."""
    a = np.asarray(getattr(a, "data", a))
    b = np.asarray(getattr(b, "data", b))
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - b) / scale)


def compare(a, b, tol: float = 1e-9) -> bool:
    return relative_residual(a, b) <= tol


# -- the reshaping isomorphisms --------------------------------------------
def _labels_hom(alpha: str) -> tuple[AxisLabel, ...]:
    h = generator_hom_shape(alpha)
    return tuple(AxisLabel(s) for s in h.codomain_spaces) + tuple(AxisLabel(s, True) for s in h.domain_spaces)


def hom_labels(alpha: str) -> tuple[AxisLabel, ...]:
    return _labels_hom(canonical_name(alpha))


def bl_labels(alpha: str) -> tuple[AxisLabel, ...]:
    hl = hom_labels(alpha)
    return tuple(hl[j] for j in bl_axis_source(canonical_name(alpha)))


def psi(alpha: str, f, L: LabelSpaces) -> Tensor:
    """Hom-space element of ``alpha`` -> vector in its Bl-space (ord order)."""
    alpha = canonical_name(alpha)
    arr = np.asarray(getattr(f, "data", f), dtype=complex)
    want = hom_shape_dims(alpha, L.as_dict())
    if arr.shape != want:
        raise ShapeMismatch(f"{alpha}: expected hom tensor of shape {want}, got {arr.shape}")
    return Tensor(np.transpose(arr, bl_axis_source(alpha)), bl_labels(alpha))


def psi_inverse(alpha: str, v, L: LabelSpaces) -> Tensor:
    alpha = canonical_name(alpha)
    arr = np.asarray(getattr(v, "data", v), dtype=complex)
    want = bl_dims(alpha, L.as_dict())
    if arr.shape != want:
        raise ShapeMismatch(f"{alpha}: expected Bl vector of shape {want}, got {arr.shape}")
    return Tensor(np.transpose(arr, inverse_permutation(bl_axis_source(alpha))), hom_labels(alpha))


# -- networks ---------------------------------------------------------------
_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _einsum_pair(a, la, b, lb, out_labels):
    names = {}
    for x in list(la) + list(lb) + list(out_labels):
        if x not in names:
            names[x] = _LETTERS[len(names)]
    spec = ("".join(names[x] for x in la) + "," + "".join(names[x] for x in lb)
            + "->" + "".join(names[x] for x in out_labels))
    return np.einsum(spec, a, b)


def contract_network(arrays: Sequence[np.ndarray], labels: Sequence[Sequence[int]],
                     output: Sequence[int]) -> np.ndarray:
    """Contract a tensor network.  Each label appears once in the output or
    exactly twice among the inputs (possibly twice in the same input, a trace).
    Pairwise contraction keeps every einsum call small."""
    items = [(np.asarray(a), list(l)) for a, l in zip(arrays, labels)]
    output = list(output)
    if not items:
        return np.ones(())

    def reduce_self(arr, lab):
        counts: dict[int, int] = {}
        for x in lab:
            counts[x] = counts.get(x, 0) + 1
        if all(v == 1 for v in counts.values()):
            return arr, lab
        keep = [x for x in dict.fromkeys(lab) if counts[x] == 1]
        names = {x: _LETTERS[i] for i, x in enumerate(dict.fromkeys(lab))}
        spec = "".join(names[x] for x in lab) + "->" + "".join(names[x] for x in keep)
        return np.einsum(spec, arr), keep

    items = [reduce_self(a, l) for a, l in items]
    while len(items) > 1:
        best = None
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                shared = set(items[i][1]) & set(items[j][1])
                size = (np.prod([items[i][0].shape[k] for k, x in enumerate(items[i][1]) if x not in shared])
                        * np.prod([items[j][0].shape[k] for k, x in enumerate(items[j][1]) if x not in shared]))
                key = (not shared, size)
                if best is None or key < best[0]:
                    best = (key, i, j, shared)
        _, i, j, shared = best
        (a, la), (b, lb) = items[i], items[j]
        out = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
        merged = (_einsum_pair(a, la, b, lb, out), out)
        items = [it for k, it in enumerate(items) if k not in (i, j)] + [merged]
    arr, lab = items[0]
    if sorted(lab) != sorted(output) or len(set(output)) != len(output):
        raise ShapeMismatch(f"network leaves {lab}, expected {output}")
    return np.transpose(arr, [lab.index(x) for x in output])

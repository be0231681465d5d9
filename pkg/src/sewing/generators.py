"""The twelve generating world sheets.

Morphism tensors are laid out codomain axes first, then domain axes.  A
closed factor ``B_cl`` contributes the two axes ``(B_l, B_r)``; several closed
factors are pair-ordered ``(l1, r1, l2, r2, ...)``, which makes the Deligne
functor ``T`` and its coherence map invisible in the encoding.

Each generator also fixes which hom-factor sits at which state boundary.
Domain factors take ords in order; codomain factors take them in reverse
order, so the cyclic boundary word of a disc reads inputs left to right and
outputs right to left (the planar convention, e.g. ``do`` has word
``[in0, out1, out0]``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .worldsheet import (
    CLOSED,
    IN,
    OPEN,
    OUT,
    ClosedBoundary,
    Component,
    OpenBoundary,
    WorldSheetSignature,
)

GENERATORS = ("mo", "do", "no", "eo", "mc", "dc", "nc", "ec", "po", "pc", "i", "istar")
OPEN_GENERATORS = ("mo", "do", "no", "eo", "po")
CLOSED_GENERATORS = ("mc", "dc", "nc", "ec", "pc")
MIXED_GENERATORS = ("i", "istar")

PRETTY = {"mo": "mo", "do": "Δo", "no": "ηo", "eo": "εo", "mc": "mc", "dc": "Δc",
          "nc": "ηc", "ec": "εc", "po": "po", "pc": "pc", "i": "ι", "istar": "ι*"}

_ALIASES = {v: k for k, v in PRETTY.items()} | {
    "Δo": "do", "ηo": "no", "εo": "eo", "Δc": "dc", "ηc": "nc", "εc": "ec",
    "ι": "i", "ι*": "istar", "iota": "i", "iotastar": "istar", "iota*": "istar",
}

OP, CL = "Bop", "Bcl"

# (domain factors, codomain factors, Euler characteristic of the quotient)
_TABLE = {
    "mo": ((OP, OP), (OP,), 1),
    "do": ((OP,), (OP, OP), 1),
    "no": ((), (OP,), 1),
    "eo": ((OP,), (), 1),
    "po": ((OP,), (OP,), 1),
    "mc": ((CL, CL), (CL,), -1),
    "dc": ((CL,), (CL, CL), -1),
    "nc": ((), (CL,), 1),
    "ec": ((CL,), (), 1),
    "pc": ((CL,), (CL,), 0),
    "i": ((CL,), (OP,), 0),
    "istar": ((OP,), (CL,), 0),
}


def canonical_name(name: str) -> str:
    if name in _TABLE:
        return name
    try:
        return _ALIASES[name]
    except KeyError:
        raise KeyError(f"unknown generator {name!r}") from None


@dataclass(frozen=True)
class HomShape:
    domain: tuple[str, ...]
    codomain: tuple[str, ...]

    @staticmethod
    def _expand(fs):
        out = []
        for f in fs:
            out.extend(("Bl", "Br") if f == CL else ("Bop",))
        return tuple(out)

    @property
    def domain_spaces(self) -> tuple[str, ...]:
        return self._expand(self.domain)

    @property
    def codomain_spaces(self) -> tuple[str, ...]:
        return self._expand(self.codomain)

    def tensor_spaces(self) -> tuple[str, ...]:
        return self.codomain_spaces + self.domain_spaces


@dataclass(frozen=True)
class Port:
    """One state boundary of a generator: hom side, factor index, kind."""
    side: str   # IN (domain) or OUT (codomain)
    index: int
    kind: str   # OPEN or CLOSED


@lru_cache(maxsize=None)
def ports(alpha: str) -> tuple[Port, ...]:
    """State boundaries of ``alpha`` in ord order (local boundary index)."""
    dom, cod, _ = _TABLE[canonical_name(alpha)]
    seq = [Port(IN, k, f) for k, f in enumerate(dom)]
    seq += [Port(OUT, k, f) for k, f in reversed(list(enumerate(cod)))]
    kinds = {OP: OPEN, CL: CLOSED}
    seq = [Port(p.side, p.index, kinds[p.kind]) for p in seq]
    return tuple([p for p in seq if p.kind == OPEN] + [p for p in seq if p.kind == CLOSED])


def port_index(alpha: str, side: str, k: int) -> int:
    side = {"i": IN, "o": OUT}.get(side, side)
    for j, p in enumerate(ports(alpha)):
        if p.side == side and p.index == k:
            return j
    raise KeyError(f"{alpha} has no {side}-port {k}")


def generator_hom_shape(alpha: str) -> HomShape:
    dom, cod, _ = _TABLE[canonical_name(alpha)]
    return HomShape(dom, cod)


@lru_cache(maxsize=None)
def _signature_and_keys(alpha: str) -> tuple[WorldSheetSignature, tuple[int, ...]]:
    alpha = canonical_name(alpha)
    chi = _TABLE[alpha][2]
    ps = ports(alpha)
    keys: list[int] = []
    word: list[OpenBoundary] = []
    closed: list[ClosedBoundary] = []
    nxt = 1
    for p in ps:
        if p.kind == OPEN:
            word.append(OpenBoundary(p.side, nxt))
            keys.append(nxt)
            nxt += 1
        else:
            closed.append(ClosedBoundary(p.side, nxt, nxt + 1))
            keys.append(nxt)
            nxt += 2
    circles = (tuple(word),) if word else ()
    return WorldSheetSignature([Component(chi, circles, tuple(closed))]), tuple(keys)


def generator_signature(alpha: str) -> WorldSheetSignature:
    return _signature_and_keys(alpha)[0]


def port_keys(alpha: str) -> tuple[int, ...]:
    """Boundary key (ord, or plus-slot) of every local boundary."""
    return _signature_and_keys(alpha)[1]


@lru_cache(maxsize=None)
def bl_axis_source(alpha: str) -> tuple[int, ...]:
    """For each axis of the generator's Bl-space (ord order), the hom-tensor
    axis it is read from."""
    alpha = canonical_name(alpha)
    dom, cod, _ = _TABLE[alpha]
    width = {OP: 1, CL: 2}
    start, pos = {}, 0
    for k, f in enumerate(cod):
        start[(OUT, k)] = pos
        pos += width[f]
    for k, f in enumerate(dom):
        start[(IN, k)] = pos
        pos += width[f]
    perm: list[int] = []
    for p in ports(alpha):
        s = start[(p.side, p.index)]
        perm.extend([s] if p.kind == OPEN else [s, s + 1])
    return tuple(perm)


def hom_shape_dims(alpha: str, dims: dict[str, int]) -> tuple[int, ...]:
    return tuple(dims[s] for s in generator_hom_shape(alpha).tensor_spaces())


def bl_dims(alpha: str, dims: dict[str, int]) -> tuple[int, ...]:
    hom = hom_shape_dims(alpha, dims)
    return tuple(hom[j] for j in bl_axis_source(alpha))


def inverse_permutation(perm) -> tuple[int, ...]:
    return tuple(int(x) for x in np.argsort(perm))

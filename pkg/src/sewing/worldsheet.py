"""Open/closed world sheets up to homeomorphism.

A world sheet is stored through its quotient surface: for each connected
component the Euler characteristic, the boundary circles that meet the
physical boundary (as cyclic words of open state boundaries, physical arcs
implied between consecutive letters) and the closed state boundaries.

Every state boundary occupies one slot (open) or two slots (closed, ``+`` and
``-`` circle of the double) of the global order; slots are a bijection onto
``1..N`` with all open slots first.  A boundary is addressed by its *key*: the
ord of an open boundary, the plus-slot of a closed one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DirectionMismatch,
    DuplicateBoundary,
    InvalidSignature,
    KindMismatch,
    UnknownBoundary,
)

IN = "in"
OUT = "out"
OPEN = "open"
CLOSED = "closed"
_DIRS = (IN, OUT)


@dataclass(frozen=True)
class OpenBoundary:
    direction: str
    ord: int

    kind = OPEN

    @property
    def key(self) -> int:
        return self.ord

    @property
    def slots(self) -> tuple[int, ...]:
        return (self.ord,)


@dataclass(frozen=True)
class ClosedBoundary:
    direction: str
    ord_plus: int
    ord_minus: int

    kind = CLOSED

    @property
    def key(self) -> int:
        return self.ord_plus

    @property
    def slots(self) -> tuple[int, ...]:
        return (self.ord_plus, self.ord_minus)


Boundary = OpenBoundary | ClosedBoundary
Circle = tuple[OpenBoundary, ...]


def _rotate_min(word: Sequence[OpenBoundary]) -> Circle:
    if not word:
        return ()
    i = min(range(len(word)), key=lambda j: word[j].ord)
    return tuple(word[i:]) + tuple(word[:i])


@dataclass(frozen=True)
class Component:
    chi: int
    circles: tuple[Circle, ...]
    closed: tuple[ClosedBoundary, ...]

    @property
    def n_boundary_circles(self) -> int:
        return len(self.circles) + len(self.closed)

    @property
    def genus(self) -> int:
        twice = 2 - self.chi - self.n_boundary_circles
        return twice // 2 if twice % 2 == 0 else -1

    def boundaries(self) -> Iterator[Boundary]:
        for w in self.circles:
            yield from w
        yield from self.closed

    def _canonical(self) -> "Component":
        circles = sorted((_rotate_min(w) for w in self.circles),
                         key=lambda w: (0, w[0].ord) if w else (1, 0))
        closed = sorted(self.closed, key=lambda b: b.ord_plus)
        return Component(self.chi, tuple(circles), tuple(closed))

    def _sort_key(self):
        slots = [s for b in self.boundaries() for s in b.slots]
        return (min(slots) if slots else float("inf"), self.chi, len(self.circles))


class WorldSheetSignature:
    """Homeomorphism-class data of a world sheet (immutable)."""

    __slots__ = ("components", "_hash")

    def __init__(self, components: Iterable[Component] = ()):
        comps = tuple(sorted((c._canonical() for c in components),
                             key=Component._sort_key))
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_hash", None)
        self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("WorldSheetSignature is immutable")

    # -- basic data ---------------------------------------------------------
    @property
    def chi(self) -> int:
        return sum(c.chi for c in self.components)

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def circles(self) -> tuple[Circle, ...]:
        return tuple(w for c in self.components for w in c.circles)

    @property
    def closed_boundaries(self) -> tuple[ClosedBoundary, ...]:
        return tuple(sorted((b for c in self.components for b in c.closed),
                            key=lambda b: b.ord_plus))

    @property
    def open_boundaries(self) -> tuple[OpenBoundary, ...]:
        return tuple(sorted((b for w in self.circles for b in w), key=lambda b: b.ord))

    def boundaries(self) -> tuple[Boundary, ...]:
        """All state boundaries, open ones by ord then closed ones by plus-slot."""
        return self.open_boundaries + self.closed_boundaries

    def boundary(self, slot: int) -> Boundary:
        for b in self.boundaries():
            if slot in b.slots:
                return b
        raise UnknownBoundary(f"no state boundary at ord {slot}")

    @property
    def n_slots(self) -> int:
        return sum(len(b.slots) for b in self.boundaries())

    @property
    def n_open(self) -> int:
        return len(self.open_boundaries)

    def genera(self) -> tuple[int, ...]:
        return tuple(c.genus for c in self.components)

    def component_of(self, key: int) -> int:
        for i, c in enumerate(self.components):
            if any(b.key == key for b in c.boundaries()):
                return i
        raise UnknownBoundary(f"no state boundary with key {key}")

    # -- value semantics ----------------------------------------------------
    def _key(self):
        return self.components

    def __eq__(self, other):
        if not isinstance(other, WorldSheetSignature):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.components)
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        parts = []
        for c in self.components:
            ws = ["[" + ",".join(f"{b.direction}{b.ord}" for b in w) + "]" for w in c.circles]
            cl = [f"{b.direction}({b.ord_plus},{b.ord_minus})" for b in c.closed]
            parts.append(f"chi={c.chi} circles={' '.join(ws) or '-'} closed={' '.join(cl) or '-'}")
        return "WorldSheetSignature(" + "; ".join(parts) + ")"

    # -- invariants ---------------------------------------------------------
    def _validate(self) -> None:
        slots: list[int] = []
        open_slots: list[int] = []
        for c in self.components:
            if c.genus < 0:
                raise InvalidSignature(f"component with chi={c.chi} and "
                                       f"{c.n_boundary_circles} boundary circles has no valid genus")
            for b in c.boundaries():
                if b.direction not in _DIRS:
                    raise InvalidSignature(f"bad direction {b.direction!r}")
                slots.extend(b.slots)
                if b.kind == OPEN:
                    open_slots.append(b.ord)
            for w in c.circles:
                ords = [b.ord for b in w]
                if ords and ords != list(range(ords[0], ords[0] + len(ords))):
                    raise InvalidSignature(f"open ords {ords} do not increase cyclically along their circle")
        if sorted(slots) != list(range(1, len(slots) + 1)):
            raise InvalidSignature(f"ord values {sorted(slots)} are not a bijection onto 1..{len(slots)}")
        if open_slots and max(open_slots) != len(open_slots):
            raise InvalidSignature("open ords must precede closed ords")

    # -- relabelling --------------------------------------------------------
    def relabel(self, slot_map: Mapping[int, int]) -> "WorldSheetSignature":
        """Rename every slot through ``slot_map`` (must be total)."""
        return WorldSheetSignature(self._relabelled_components(slot_map))

    def _relabelled_components(self, slot_map: Mapping[int, int]) -> list[Component]:
        def ob(b):
            return OpenBoundary(b.direction, slot_map[b.ord])

        def cb(b):
            return ClosedBoundary(b.direction, slot_map[b.ord_plus], slot_map[b.ord_minus])

        try:
            comps = [Component(c.chi, tuple(tuple(ob(b) for b in w) for w in c.circles),
                               tuple(cb(b) for b in c.closed)) for c in self.components]
        except KeyError as exc:
            raise UnknownBoundary(f"slot {exc.args[0]} missing from relabelling") from None
        return comps


EMPTY = WorldSheetSignature()


def disc(*boundaries: OpenBoundary) -> WorldSheetSignature:
    return WorldSheetSignature([Component(1, (tuple(boundaries),), ())])


# ---------------------------------------------------------------------------
# sewing data
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SewingData:
    """Ordered pairs ``(out_slot, in_slot)``; closed boundaries may be given by
    either circle, as long as both entries of a pair use the same one."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __init__(self, pairs: Iterable[Sequence[int]] = ()):
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _resolve(sig: WorldSheetSignature, sewing: SewingData | Iterable) -> list[tuple[Boundary, Boundary]]:
    if not isinstance(sewing, SewingData):
        sewing = SewingData(sewing)
    by_slot: dict[int, tuple[Boundary, int]] = {}
    for b in sig.boundaries():
        for pos, s in enumerate(b.slots):
            by_slot[s] = (b, pos)
    seen: set[int] = set()
    out: list[tuple[Boundary, Boundary]] = []
    for a_slot, b_slot in sewing.pairs:
        try:
            a, pa = by_slot[a_slot]
            b, pb = by_slot[b_slot]
        except KeyError as exc:
            raise UnknownBoundary(f"ord {exc.args[0]} does not name a state boundary") from None
        for x in (a, b):
            if x.key in seen:
                raise DuplicateBoundary(f"state boundary at ord {x.key} appears in two sewing pairs")
            seen.add(x.key)
        if a.key == b.key:
            raise DuplicateBoundary(f"state boundary at ord {a.key} sewn to itself")
        if a.kind != b.kind:
            raise KindMismatch(f"cannot sew {a.kind} boundary {a_slot} to {b.kind} boundary {b_slot}")
        if a.kind == CLOSED and pa != pb:
            raise KindMismatch(f"closed sewing must pair + with + and - with -: {a_slot}, {b_slot}")
        if a.direction != OUT or b.direction != IN:
            raise DirectionMismatch(f"pair ({a_slot}, {b_slot}) must go from an out- to an in-boundary")
        out.append((a, b))
    return out


def validate_sewing(sig: WorldSheetSignature, sewing: SewingData | Iterable) -> None:
    _resolve(sig, sewing)


# ---------------------------------------------------------------------------
# tensor product
# ---------------------------------------------------------------------------
def tensor_with_maps(sigs: Sequence[WorldSheetSignature]
                     ) -> tuple[WorldSheetSignature, list[dict[int, int]]]:
    """Disjoint union; also returns, per factor, the map old slot -> new slot.

    New order: open boundaries factor by factor, then closed ones factor by factor.
    """
    n_open_total = sum(s.n_open for s in sigs)
    maps: list[dict[int, int]] = []
    open_off = 0
    closed_off = n_open_total
    for s in sigs:
        m: dict[int, int] = {}
        no = s.n_open
        for b in s.open_boundaries:
            m[b.ord] = b.ord + open_off
        for b in s.closed_boundaries:
            for x in b.slots:
                m[x] = x - no + closed_off
        open_off += no
        closed_off += s.n_slots - no
        maps.append(m)
    comps = [c for s, m in zip(sigs, maps) for c in s._relabelled_components(m)]
    return WorldSheetSignature(comps), maps


def tensor(*sigs: WorldSheetSignature) -> WorldSheetSignature:
    return tensor_with_maps(sigs)[0]


# ---------------------------------------------------------------------------
# sewing
# ---------------------------------------------------------------------------
def sew_with_map(sig: WorldSheetSignature, sewing: SewingData | Iterable
                 ) -> tuple[WorldSheetSignature, dict[int, int]]:
    """Sew and return the new signature plus the map old slot -> new slot of
    every surviving state boundary."""
    pairs = _resolve(sig, sewing)

    circles: list[list[OpenBoundary]] = []
    circ_comp: list[int] = []
    closed: list[ClosedBoundary] = []
    closed_comp: list[int] = []
    chi: dict[int, int] = {}
    for i, c in enumerate(sig.components):
        chi[i] = c.chi
        for w in c.circles:
            circles.append(list(w))
            circ_comp.append(i)
        for b in c.closed:
            closed.append(b)
            closed_comp.append(i)

    def merge(c1: int, c2: int) -> int:
        if c1 == c2:
            return c1
        chi[c1] += chi.pop(c2)
        for lst in (circ_comp, closed_comp):
            for j, v in enumerate(lst):
                if v == c2:
                    lst[j] = c1
        return c1

    def locate(b: OpenBoundary) -> int:
        for j, w in enumerate(circles):
            if b in w:
                return j
        raise AssertionError("boundary vanished")

    for a, b in pairs:
        if a.kind == OPEN:
            ia, ib = locate(a), locate(b)
            wa = circles[ia]
            k = wa.index(a)
            wa = wa[k:] + wa[:k]
            if ia == ib:
                j = wa.index(b)
                circles[ia] = wa[1:j]
                circles.append(wa[j + 1:])
                circ_comp.append(circ_comp[ia])
                chi[circ_comp[ia]] -= 1
            else:
                wb = circles[ib]
                k = wb.index(b)
                wb = wb[k:] + wb[:k]
                root = merge(circ_comp[ia], circ_comp[ib])
                circles[ia] = wa[1:] + wb[1:]
                del circles[ib]
                del circ_comp[ib]
                chi[root] -= 1
        else:
            ia, ib = closed.index(a), closed.index(b)
            merge(closed_comp[ia], closed_comp[ib])
            for j in sorted((ia, ib), reverse=True):
                del closed[j]
                del closed_comp[j]

    # recompute the order: open boundaries circle by circle from the smallest
    # surviving old ord, closed ones compacted in their old order
    slot_map: dict[int, int] = {}
    pending = sorted((x for w in circles for x in w), key=lambda x: x.ord)
    done: set[int] = set()
    nxt = 1
    for a0 in pending:
        if a0.ord in done:
            continue
        w = circles[locate(a0)]
        k = w.index(a0)
        for x in w[k:] + w[:k]:
            slot_map[x.ord] = nxt
            done.add(x.ord)
            nxt += 1
    n_open = nxt - 1
    for rank, s in enumerate(sorted(s for b in closed for s in b.slots)):
        slot_map[s] = n_open + 1 + rank

    comps = []
    for cid in chi:
        comps.append(Component(
            chi[cid],
            tuple(tuple(OpenBoundary(x.direction, slot_map[x.ord]) for x in w)
                  for w, c in zip(circles, circ_comp) if c == cid),
            tuple(ClosedBoundary(x.direction, slot_map[x.ord_plus], slot_map[x.ord_minus])
                  for x, c in zip(closed, closed_comp) if c == cid),
        ))
    return WorldSheetSignature(comps), slot_map


def sew(sig: WorldSheetSignature, sewing: SewingData | Iterable) -> WorldSheetSignature:
    return sew_with_map(sig, sewing)[0]


# ---------------------------------------------------------------------------
# homeomorphism
# ---------------------------------------------------------------------------
def same_homeo_class(x: WorldSheetSignature, y: WorldSheetSignature) -> bool:
    """Homeomorphisms of world sheets preserve the order map, so after
    canonicalisation (rotation of circle words, sorting) this is equality."""
    return x == y


def _component_isos(cx: Component, cy: Component) -> Iterator[dict[int, int]]:
    if (cx.chi != cy.chi or len(cx.circles) != len(cy.circles)
            or len(cx.closed) != len(cy.closed)):
        return
    xs_cl = [b for b in cx.closed]
    for perm in itertools.permutations(cy.closed):
        if any(a.direction != b.direction for a, b in zip(xs_cl, perm)):
            continue
        base = {}
        for a, b in zip(xs_cl, perm):
            base[a.ord_plus] = b.ord_plus
            base[a.ord_minus] = b.ord_minus
        yield from _circle_isos(list(cx.circles), list(cy.circles), base)


def _circle_isos(xs: list[Circle], ys: list[Circle], acc: dict[int, int]) -> Iterator[dict[int, int]]:
    if not xs:
        yield dict(acc)
        return
    w, rest = xs[0], xs[1:]
    for j, v in enumerate(ys):
        if len(v) != len(w):
            continue
        others = ys[:j] + ys[j + 1:]
        rotations = range(len(v)) if v else [0]
        for r in rotations:
            vr = v[r:] + v[:r]
            if any(a.direction != b.direction for a, b in zip(w, vr)):
                continue
            m = dict(acc)
            m.update({a.ord: b.ord for a, b in zip(w, vr)})
            yield from _circle_isos(rest, others, m)


def isomorphisms(x: WorldSheetSignature, y: WorldSheetSignature) -> Iterator[dict[int, int]]:
    """All slot bijections ``x -> y`` that are homeomorphisms once the order
    map is ignored (circle words up to rotation, closed +/- kept)."""
    if x.n_components != y.n_components:
        return

    def go(i: int, used: frozenset, acc: dict[int, int]):
        if i == len(x.components):
            yield dict(acc)
            return
        for j, cy in enumerate(y.components):
            if j in used:
                continue
            for m in _component_isos(x.components[i], cy):
                yield from go(i + 1, used | {j}, {**acc, **m})

    yield from go(0, frozenset(), {})


def homeomorphic_ignoring_order(x: WorldSheetSignature, y: WorldSheetSignature) -> bool:
    return next(isomorphisms(x, y), None) is not None


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------
def _word_json(w: Circle) -> list[dict]:
    if not w:
        return [{"phys": {}}]
    out: list[dict] = []
    for b in w:
        out.append({"open": {"dir": b.direction, "ord": b.ord}})
        out.append({"phys": {}})
    return out


def signature_to_json(sig: WorldSheetSignature) -> dict:
    circles, circle_comp, closed = [], [], []
    for i, c in enumerate(sig.components):
        for w in c.circles:
            circles.append(_word_json(w))
            circle_comp.append(i)
        for b in c.closed:
            closed.append({"dir": b.direction, "ordPlus": b.ord_plus,
                           "ordMinus": b.ord_minus, "component": i})
    return {
        "chi": sig.chi,
        "components": sig.n_components,
        "componentChi": [c.chi for c in sig.components],
        "circles": circles,
        "circleComponents": circle_comp,
        "closed": closed,
    }


def _parse_word(items: list) -> Circle:
    letters: list[OpenBoundary | None] = []
    for it in items:
        if not isinstance(it, dict) or len(it) != 1:
            raise InvalidSignature(f"bad circle letter {it!r}")
        if "phys" in it:
            if not letters or letters[-1] is not None:
                letters.append(None)
        elif "open" in it:
            o = it["open"]
            letters.append(OpenBoundary(str(o["dir"]), int(o["ord"])))
        else:
            raise InvalidSignature(f"bad circle letter {it!r}")
    if len(letters) > 1 and letters[0] is None and letters[-1] is None:
        letters.pop()
    opens = [x for x in letters if x is not None]
    if opens:
        n = len(letters)
        for i in range(n):
            if letters[i] is not None and letters[(i + 1) % n] is not None:
                raise InvalidSignature("open state boundaries must be separated by physical arcs")
    return tuple(opens)


def signature_from_json(doc: dict) -> WorldSheetSignature:
    try:
        n = int(doc["components"])
        comp_chi = doc.get("componentChi")
        if comp_chi is None:
            if n > 1:
                raise InvalidSignature("componentChi is required for more than one component")
            comp_chi = [int(doc["chi"])] * n
        if len(comp_chi) != n:
            raise InvalidSignature("componentChi length differs from components")
        circle_comp = doc.get("circleComponents", [0] * len(doc.get("circles", [])))
        words = [[] for _ in range(n)]
        for w, ci in zip(doc.get("circles", []), circle_comp):
            words[int(ci)].append(_parse_word(w))
        closed = [[] for _ in range(n)]
        for b in doc.get("closed", []):
            closed[int(b.get("component", 0))].append(
                ClosedBoundary(str(b["dir"]), int(b["ordPlus"]), int(b["ordMinus"])))
        sig = WorldSheetSignature(Component(int(comp_chi[i]), tuple(words[i]), tuple(closed[i]))
                                  for i in range(n))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InvalidSignature(f"malformed world sheet document: {exc}") from None
    if "chi" in doc and int(doc["chi"]) != sig.chi:
        raise InvalidSignature("chi does not match the component values")
    return sig


def sewing_to_json(s: SewingData) -> list[list[int]]:
    return [list(p) for p in s.pairs]


def sewing_from_json(doc) -> SewingData:
    try:
        return SewingData((int(a), int(b)) for a, b in doc)
    except (TypeError, ValueError) as exc:
        raise InvalidSignature(f"malformed sewing data: {exc}") from None

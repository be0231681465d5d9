"""Rewriting decompositions with the defining relations.

A rule replaces a connected fragment of generators by another fragment with
the same dangling ports (listed domain first, then codomain, in the order of
the corresponding tensor equation).  Dangling ports of a matched fragment may
be sewn to anything, including each other.  Equality proofs search over rule
applications in both directions with a bidirectional breadth-first search on
canonically numbered terms.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    BadPermutation,
    InterfaceMismatch,
    InvalidDecomposition,
    NoMatch,
    NotACylinder,
    ParseError,
    TargetMismatch,
)
from .evaluator import Decomposition
from .generators import OPEN_GENERATORS, port_index, ports
from .worldsheet import IN, OUT

Port = tuple[int, int]


# ---------------------------------------------------------------------------
# terms
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Term:
    """Factors, out->in edges and the ports matched to target boundaries."""
    factors: tuple[str, ...]
    edges: frozenset
    interface: tuple[Port, ...]

    @classmethod
    def from_decomposition(cls, d: Decomposition) -> "Term":
        return cls(d.factors, frozenset(d.sewing), d.matching)

    def to_decomposition(self, target) -> Decomposition:
        return Decomposition(self.factors, sorted(self.edges), target, self.interface)

    def partners(self) -> dict[Port, tuple]:
        out: dict[Port, tuple] = {}
        for a, b in self.edges:
            out[a] = ("edge", b)
            out[b] = ("edge", a)
        for t, p in enumerate(self.interface):
            out[p] = ("iface", t)
        return out

    def permute(self, sigma: Sequence[int]) -> "Term":
        sigma = list(sigma)
        if sorted(sigma) != list(range(len(self.factors))):
            raise BadPermutation(f"{sigma} does not permute {len(self.factors)} factors")
        new = {old: k for k, old in enumerate(sigma)}

        def mv(p):
            return (new[p[0]], p[1])

        return Term(tuple(self.factors[i] for i in sigma),
                    frozenset((mv(a), mv(b)) for a, b in self.edges),
                    tuple(mv(p) for p in self.interface))


def canonical(term: Term) -> tuple[tuple, list[int]]:
    """Canonical key and the factor order producing it.  Factors are numbered
    by breadth-first search from the interface ports; parts not reachable
    from the interface start from whichever factor gives the least key."""
    part = term.partners()
    n = len(term.factors)
    order: list[int] = []
    seen: set[int] = set()

    def bfs(starts: Iterable[int], order, seen):
        q = deque()
        for s in starts:
            if s not in seen:
                seen.add(s)
                order.append(s)
                q.append(s)
        while q:
            i = q.popleft()
            for p in range(len(ports(term.factors[i]))):
                kind, other = part[(i, p)]
                if kind == "edge" and other[0] not in seen:
                    seen.add(other[0])
                    order.append(other[0])
                    q.append(other[0])

    bfs([p[0] for p in term.interface], order, seen)
    while len(order) < n:
        best = None
        for s in range(n):
            if s in seen:
                continue
            o, sn = list(order), set(seen)
            bfs([s], o, sn)
            key = _encode(term, o)
            if best is None or key < best[0]:
                best = (key, o, sn)
        _, order, seen = best
    return _encode(term, order), order


def _encode(term: Term, order: list[int]) -> tuple:
    new = {old: k for k, old in enumerate(order)}

    def mv(p):
        return (new[p[0]], p[1]) if p[0] in new else (len(order) + p[0], p[1])

    return (tuple(term.factors[i] for i in order),
            tuple(sorted((mv(a), mv(b)) for a, b in term.edges)),
            tuple(mv(p) for p in term.interface))


# ---------------------------------------------------------------------------
# rules
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Fragment:
    factors: tuple[str, ...]
    edges: tuple[tuple[Port, Port], ...]
    dom: tuple[Port, ...]
    cod: tuple[Port, ...]

    @property
    def dangling(self) -> tuple[Port, ...]:
        return self.dom + self.cod


@dataclass(frozen=True)
class RewriteRule:
    id: str
    lhs: Fragment
    rhs: Fragment

    @property
    def relation(self) -> int | None:
        return int(self.id[1:]) if self.id.startswith("R") else None

    def decompositions(self) -> tuple[Decomposition, Decomposition]:
        """Both sides as decompositions of one world sheet, dangling ports
        matched by position."""
        lhs = Decomposition(self.lhs.factors, self.lhs.edges)
        pos = {p: k for k, p in enumerate(self.lhs.dangling)}
        matching = [self.rhs.dangling[pos[p]] for p in lhs.matching]
        return lhs, Decomposition(self.rhs.factors, self.rhs.edges, lhs.target, matching)


def _frag(factors, edges, dom, cod) -> Fragment:
    def pt(ref):
        k, spec = ref
        return (k, port_index(factors[k], spec[0], int(spec[1:])))

    return Fragment(tuple(factors), tuple((pt((a, pa)), pt((b, pb))) for a, pa, b, pb in edges),
                    tuple(pt(r) for r in dom), tuple(pt(r) for r in cod))


def _single(alpha: str) -> Fragment:
    dom = [(0, f"i{k}") for k in range(sum(p.side == IN for p in ports(alpha)))]
    cod = [(0, f"o{k}") for k in range(sum(p.side == OUT for p in ports(alpha)))]
    return _frag([alpha], [], dom, cod)


def _frobenius_rules(m: str, d: str, n: str, e: str, p: str, ids: dict[str, int]) -> list[RewriteRule]:
    """Unit, counit, (co)associativity, Frobenius and absorption rules of
    one Frobenius structure, numbered by ``ids``."""
    F = _frag
    units = {
        "unit_left": F([n, m], [(0, "o0", 1, "i0")], [(1, "i1")], [(1, "o0")]),
        "unit_right": F([n, m], [(0, "o0", 1, "i1")], [(1, "i0")], [(1, "o0")]),
        "counit_left": F([d, e], [(0, "o0", 1, "i0")], [(0, "i0")], [(0, "o1")]),
        "counit_right": F([d, e], [(0, "o1", 1, "i0")], [(0, "i0")], [(0, "o0")]),
    }
    rules = [RewriteRule(f"R{ids[k]}", frag, _single(p)) for k, frag in units.items() if k in ids]
    delta_after_m = F([m, d], [(0, "o0", 1, "i0")], [(0, "i0"), (0, "i1")], [(1, "o0"), (1, "o1")])
    rules += [
        RewriteRule(f"R{ids['assoc']}",
                    F([m, m], [(0, "o0", 1, "i0")], [(0, "i0"), (0, "i1"), (1, "i1")], [(1, "o0")]),
                    F([m, m], [(0, "o0", 1, "i1")], [(1, "i0"), (0, "i0"), (0, "i1")], [(1, "o0")])),
        RewriteRule(f"R{ids['coassoc']}",
                    F([d, d], [(0, "o0", 1, "i0")], [(0, "i0")], [(1, "o0"), (1, "o1"), (0, "o1")]),
                    F([d, d], [(0, "o1", 1, "i0")], [(0, "i0")], [(0, "o0"), (1, "o0"), (1, "o1")])),
        RewriteRule(f"R{ids['frob_left']}",
                    F([d, m], [(0, "o0", 1, "i1")], [(1, "i0"), (0, "i0")], [(1, "o0"), (0, "o1")]),
                    delta_after_m),
        RewriteRule(f"R{ids['frob_right']}",
                    F([d, m], [(0, "o1", 1, "i0")], [(0, "i0"), (1, "i1")], [(0, "o0"), (1, "o0")]),
                    delta_after_m),
        RewriteRule(f"R{ids['absorb_m']}",
                    F([m, p], [(0, "o0", 1, "i0")], [(0, "i0"), (0, "i1")], [(1, "o0")]), _single(m)),
        RewriteRule(f"R{ids['absorb_n']}", F([n, p], [(0, "o0", 1, "i0")], [], [(1, "o0")]), _single(n)),
        RewriteRule(f"R{ids['absorb_d']}",
                    F([p, d], [(0, "o0", 1, "i0")], [(0, "i0")], [(1, "o0"), (1, "o1")]), _single(d)),
        RewriteRule(f"R{ids['absorb_e']}", F([p, e], [(0, "o0", 1, "i0")], [(0, "i0")], []), _single(e)),
    ]
    return rules


_OPEN_IDS = dict(unit_left=1, unit_right=2, counit_left=3, counit_right=4, assoc=6, coassoc=7,
                 frob_left=8, frob_right=9, absorb_m=10, absorb_n=11, absorb_d=12, absorb_e=13)
_CLOSED_IDS = dict(unit_right=14, counit_right=15, assoc=16, coassoc=17, frob_left=18, frob_right=19,
                   absorb_m=21, absorb_n=22, absorb_d=23, absorb_e=24)


def _build_rules() -> dict[str, RewriteRule]:
    F = _frag
    rules = (_frobenius_rules("mo", "do", "no", "eo", "po", _OPEN_IDS)
             + _frobenius_rules("mc", "dc", "nc", "ec", "pc", _CLOSED_IDS))
    rules += [
        RewriteRule("R5", F(["mo", "eo"], [(0, "o0", 1, "i0")], [(0, "i0"), (0, "i1")], []),
                    F(["mo", "eo"], [(0, "o0", 1, "i0")], [(0, "i1"), (0, "i0")], [])),
        RewriteRule("R20", F(["mc"], [], [(0, "i0"), (0, "i1")], [(0, "o0")]),
                    F(["mc"], [], [(0, "i1"), (0, "i0")], [(0, "o0")])),
        RewriteRule("R25", _single("pc"), _single("pc")),
        RewriteRule("R26", F(["nc", "dc", "i", "mo", "eo"],
                             [(0, "o0", 1, "i0"), (1, "o0", 2, "i0"), (2, "o0", 3, "i1"), (3, "o0", 4, "i0")],
                             [(3, "i0")], [(1, "o1")]), _single("istar")),
        RewriteRule("R27", F(["no", "do", "istar", "mc", "ec"],
                             [(0, "o0", 1, "i0"), (1, "o0", 2, "i0"), (2, "o0", 3, "i1"), (3, "o0", 4, "i0")],
                             [(3, "i0")], [(1, "o1")]), _single("i")),
        RewriteRule("R28", F(["i", "mo"], [(0, "o0", 1, "i0")], [(0, "i0"), (1, "i1")], [(1, "o0")]),
                    F(["i", "mo"], [(0, "o0", 1, "i1")], [(0, "i0"), (1, "i0")], [(1, "o0")])),
        RewriteRule("R29", F(["mc", "i"], [(0, "o0", 1, "i0")], [(0, "i0"), (0, "i1")], [(1, "o0")]),
                    F(["i", "i", "mo"], [(0, "o0", 2, "i0"), (1, "o0", 2, "i1")],
                      [(0, "i0"), (1, "i0")], [(2, "o0")])),
        RewriteRule("R30", F(["nc", "i"], [(0, "o0", 1, "i0")], [], [(1, "o0")]), _single("no")),
        RewriteRule("R31", F(["istar", "i"], [(0, "o0", 1, "i0")], [(0, "i0")], [(1, "o0")]),
                    F(["do", "mo"], [(0, "o0", 1, "i1"), (0, "o1", 1, "i0")], [(0, "i0")], [(1, "o0")])),
        RewriteRule("R32", F(["dc", "mc"], [(0, "o0", 1, "i0"), (0, "o1", 1, "i1")], [(0, "i0")], [(1, "o0")]),
                    F(["mc", "dc"], [(0, "o0", 1, "i0"), (1, "o1", 0, "i1")], [(0, "i0")], [(1, "o0")])),
    ]
    return {r.id: r for r in rules}


@lru_cache(maxsize=None)
def rules() -> dict[str, RewriteRule]:
    """All relation rules keyed by id (``"R1"`` ... ``"R32"``)."""
    return _build_rules()


def get_rule(rule_id) -> RewriteRule:
    key = f"R{rule_id}" if isinstance(rule_id, int) else str(rule_id)
    try:
        return rules()[key]
    except KeyError:
        raise KeyError(f"no rule {rule_id!r}") from None


# ---------------------------------------------------------------------------
# matching and application
# ---------------------------------------------------------------------------
LR, RL = "lr", "rl"


def _sides(rule: RewriteRule, direction: str) -> tuple[Fragment, Fragment]:
    if direction == LR:
        return rule.lhs, rule.rhs
    if direction == RL:
        return rule.rhs, rule.lhs
    raise ValueError(f"direction must be {LR!r} or {RL!r}, got {direction!r}")


def matches(term: Term, frag: Fragment, part: dict | None = None) -> Iterable[tuple[int, ...]]:
    """Every placement of ``frag`` in ``term``, as term factor indices in
    fragment factor order."""
    part = term.partners() if part is None else part
    k = len(frag.factors)
    adj: dict[int, list[tuple[int, int, int]]] = {i: [] for i in range(k)}
    for (a, pa), (b, pb) in frag.edges:
        adj[a].append((pa, b, pb))
        adj[b].append((pb, a, pa))
    for start in range(len(term.factors)):
        if term.factors[start] != frag.factors[0]:
            continue
        assign = {0: start}
        stack = [0]
        ok = True
        while stack and ok:
            i = stack.pop()
            for pa, j, pb in adj[i]:
                kind, other = part[(assign[i], pa)]
                if kind != "edge" or other[1] != pb or term.factors[other[0]] != frag.factors[j]:
                    ok = False
                    break
                if j in assign:
                    if assign[j] != other[0]:
                        ok = False
                        break
                else:
                    if other[0] in assign.values():
                        ok = False
                        break
                    assign[j] = other[0]
                    stack.append(j)
        if ok and len(assign) == k:
            yield tuple(assign[i] for i in range(k))


def _is_match(term: Term, frag: Fragment, pos: Sequence[int], part: dict) -> bool:
    if len(pos) != len(frag.factors) or len(set(pos)) != len(pos):
        return False
    if any(not 0 <= i < len(term.factors) or term.factors[i] != a for i, a in zip(pos, frag.factors)):
        return False
    return all(part[(pos[a], pa)] == ("edge", (pos[b], pb)) for (a, pa), (b, pb) in frag.edges)


def _replace(term: Term, src: Fragment, dst: Fragment, pos: Sequence[int], part: dict) -> Term:
    matched = set(pos)
    kept = [i for i in range(len(term.factors)) if i not in matched]
    new = {old: k for k, old in enumerate(kept)}
    off = len(kept)
    factors = tuple(term.factors[i] for i in kept) + dst.factors
    edges = {((new[a[0]], a[1]), (new[b[0]], b[1])) for a, b in term.edges
             if a[0] in new and b[0] in new}
    edges |= {((off + a[0], a[1]), (off + b[0], b[1])) for a, b in dst.edges}
    interface = [None if p[0] in matched else (new[p[0]], p[1]) for p in term.interface]
    src_ports = [(pos[k], p) for k, p in src.dangling]
    index_of = {p: u for u, p in enumerate(src_ports)}
    dst_ports = [(off + k, p) for k, p in dst.dangling]
    n_dom = len(src.dom)
    for u, sp in enumerate(src_ports):
        du = dst_ports[u]
        kind, other = part[sp]
        if kind == "iface":
            interface[other] = du
        elif other in index_of:
            v = index_of[other]
            if u >= n_dom:       # add a loop once, from its out end
                edges.add((du, dst_ports[v]))
        else:
            q = (new[other[0]], other[1])
            edges.add((q, du) if u < n_dom else (du, q))
    return Term(factors, frozenset(edges), tuple(interface))


def apply_term(term: Term, rule: RewriteRule, position: Sequence[int], direction: str = LR) -> Term:
    src, dst = _sides(rule, direction)
    part = term.partners()
    if not _is_match(term, src, position, part):
        raise NoMatch(f"{rule.id} ({direction}) does not match at {list(position)}")
    if len(src.dom) != len(dst.dom) or len(src.cod) != len(dst.cod):
        raise InterfaceMismatch(f"{rule.id} sides have different dangling interfaces")
    return _replace(term, src, dst, position, part)


def apply_rule(t: Decomposition, rule: RewriteRule | str | int, position: Sequence[int],
               direction: str = LR) -> Decomposition:
    """Replace the fragment at ``position`` (term factor indices in fragment
    order).  The new factors are appended after the untouched ones; the
    result is revalidated against the unchanged target."""
    rule = rule if isinstance(rule, RewriteRule) else get_rule(rule)
    new = apply_term(Term.from_decomposition(t), rule, position, direction)
    try:
        return new.to_decomposition(t.target)
    except InvalidDecomposition as exc:
        raise InterfaceMismatch(f"{rule.id} changed the world sheet: {exc}") from None


def permute_factors(t: Decomposition, sigma: Sequence[int]) -> Decomposition:
    return t.permute_factors(sigma)


def _eliminate(term: Term, position: int) -> Term:
    if not 0 <= position < len(term.factors) or term.factors[position] not in ("po", "pc"):
        raise NotACylinder(f"factor {position} is not a cylinder")
    part = term.partners()
    pin = port_index(term.factors[position], "i", 0)
    pout = port_index(term.factors[position], "o", 0)
    a, b = part[(position, pin)], part[(position, pout)]
    if a[0] == "iface" and b[0] == "iface":
        raise NotACylinder(f"cylinder {position} is not sewn to anything")
    if a == ("edge", (position, pout)):
        raise NotACylinder(f"cylinder {position} is sewn to itself")
    kept = [i for i in range(len(term.factors)) if i != position]
    new = {old: k for k, old in enumerate(kept)}

    def mv(p):
        return (new[p[0]], p[1])

    edges = {(mv(x), mv(y)) for x, y in term.edges if position not in (x[0], y[0])}
    interface = [None if p[0] == position else mv(p) for p in term.interface]
    if a[0] == "edge" and b[0] == "edge":
        edges.add((mv(a[1]), mv(b[1])))
    elif a[0] == "edge":
        interface[b[1]] = mv(a[1])
    else:
        interface[a[1]] = mv(b[1])
    return Term(tuple(term.factors[i] for i in kept), frozenset(edges), tuple(interface))


def eliminate_cylinder(t: Decomposition, position: int) -> Decomposition:
    """Drop a ``po``/``pc`` factor sewn onto another factor, joining its two
    neighbours directly."""
    return _eliminate(Term.from_decomposition(t), position).to_decomposition(t.target)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Step:
    move: str                       # "rule", "permute" or "cylinder"
    rule: str | None = None
    direction: str | None = None
    position: tuple[int, ...] = ()
    sigma: tuple[int, ...] = ()

    def to_json(self) -> dict:
        if self.move == "rule":
            return {"move": "rule", "rule": self.rule, "direction": self.direction,
                    "position": list(self.position)}
        if self.move == "permute":
            return {"move": "permute", "sigma": list(self.sigma)}
        return {"move": "cylinder", "position": list(self.position)}

    @classmethod
    def from_json(cls, doc: dict) -> "Step":
        try:
            mv = doc["move"]
            if mv == "rule":
                return cls("rule", str(doc["rule"]), str(doc["direction"]), tuple(doc["position"]))
            if mv == "permute":
                return cls("permute", sigma=tuple(doc["sigma"]))
            if mv == "cylinder":
                return cls("cylinder", position=tuple(doc["position"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed certificate step: {exc}") from None
        raise ParseError(f"unknown move {doc.get('move')!r}")


@dataclass(frozen=True)
class DerivationCertificate:
    steps: tuple[Step, ...]

    @property
    def rule_steps(self) -> list[Step]:
        return [s for s in self.steps if s.move == "rule"]

    @property
    def length(self) -> int:
        """Number of relation applications."""
        return len(self.rule_steps)

    @property
    def relations(self) -> list[str]:
        return [s.rule for s in self.rule_steps]

    def to_json(self) -> dict:
        return {"length": self.length, "relations": self.relations,
                "steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, doc: dict) -> "DerivationCertificate":
        try:
            return cls(tuple(Step.from_json(s) for s in doc["steps"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed certificate: {exc}") from None


def replay_terms(t: Decomposition, cert: DerivationCertificate) -> list[Decomposition]:
    """Every intermediate decomposition, starting with ``t``."""
    out = [t]
    for s in cert.steps:
        cur = out[-1]
        if s.move == "rule":
            out.append(apply_rule(cur, s.rule, s.position, s.direction))
        elif s.move == "permute":
            out.append(cur.permute_factors(s.sigma))
        else:
            out.append(eliminate_cylinder(cur, s.position[0]))
    return out


def replay(t: Decomposition, cert: DerivationCertificate) -> Decomposition:
    return replay_terms(t, cert)[-1]


def verify_certificate(t1: Decomposition, t2: Decomposition, cert: DerivationCertificate) -> bool:
    return replay(t1, cert) == t2


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------
@dataclass
class SearchFailure:
    reason: str
    expansions: int

    def __bool__(self):
        return False


def _rule_pool(*terms: Term) -> list[RewriteRule]:
    names = {a for t in terms for a in t.factors}
    pool = [r for r in rules().values() if r.id != "R25"]
    if names <= set(OPEN_GENERATORS):
        pool = [r for r in pool if set(r.lhs.factors + r.rhs.factors) <= set(OPEN_GENERATORS)]
    return pool


def _moves(term: Term, pool, max_factors: int):
    part = term.partners()
    for rule in pool:
        for direction in (LR, RL):
            src, dst = _sides(rule, direction)
            if len(term.factors) - len(src.factors) + len(dst.factors) > max_factors:
                continue
            for pos in matches(term, src, part):
                yield rule, direction, pos, _replace(term, src, dst, pos, part)


def _inverse_perm(order: Sequence[int]) -> list[int]:
    inv = [0] * len(order)
    for k, old in enumerate(order):
        inv[old] = k
    return inv


def prove_equal(t1: Decomposition, t2: Decomposition, budget: int = 100_000,
                max_extra_factors: int = 4, max_length: int = 24) -> DerivationCertificate | SearchFailure:
    """Bidirectional breadth-first search for a chain of rule applications
    turning ``t1`` into ``t2``.  Terms are compared up to renumbering of
    factors; the certificate records the renumberings as permute steps."""
    if t1.target != t2.target:
        raise TargetMismatch("decompositions present different world sheets")
    a, b = Term.from_decomposition(t1), Term.from_decomposition(t2)
    pool = _rule_pool(a, b)
    cap = max(len(a.factors), len(b.factors)) + max_extra_factors
    ka, oa = canonical(a)
    kb, ob = canonical(b)
    # node -> (canonical representative, parent key, rule, direction, position in parent rep)
    trees = [{ka: (a.permute(oa), None, None, None, None)}, {kb: (b.permute(ob), None, None, None, None)}]
    frontiers = [[ka], [kb]]
    depth = [0, 0]
    expansions = 0
    meet = ka if ka == kb else None
    while meet is None:
        if not frontiers[0] and not frontiers[1]:
            return SearchFailure("search space exhausted", expansions)
        if depth[0] + depth[1] >= max_length:
            return SearchFailure("length bound reached", expansions)
        side = 0 if (len(frontiers[0]) <= len(frontiers[1]) and frontiers[0]) or not frontiers[1] else 1
        tree, other = trees[side], trees[1 - side]
        nxt = []
        for key in frontiers[side]:
            rep = tree[key][0]
            for rule, direction, pos, child in _moves(rep, pool, cap):
                expansions += 1
                if expansions > budget:
                    return SearchFailure("budget exhausted", expansions)
                ck, order = canonical(child)
                if ck in tree:
                    continue
                tree[ck] = (child.permute(order), key, rule.id, direction, pos)
                nxt.append(ck)
                if ck in other:
                    meet = ck
                    break
            if meet is not None:
                break
        frontiers[side] = nxt
        depth[side] += 1
    return _certificate(t1, t2, trees, meet, oa, ob)


def _path(tree, key) -> list:
    out = []
    while tree[key][1] is not None:
        out.append(key)
        key = tree[key][1]
    return out[::-1]


def _certificate(t1, t2, trees, meet, oa, ob) -> DerivationCertificate:
    fwd, bwd = trees
    steps: list[Step] = [Step("permute", sigma=tuple(oa))]
    # forward half: states are canonical representatives
    for key in _path(fwd, meet):
        rep, parent, rid, direction, pos = fwd[key]
        parent_rep = fwd[parent][0]
        steps.append(Step("rule", rid, direction, tuple(pos)))
        raw = apply_term(parent_rep, get_rule(rid), pos, direction)
        _, order = canonical(raw)
        steps.append(Step("permute", sigma=tuple(order)))
    # backward half, walked from the meeting point towards t2
    key = meet
    while bwd[key][1] is not None:
        rep, parent, rid, direction, pos = bwd[key]
        parent_rep = bwd[parent][0]
        rule = get_rule(rid)
        raw = apply_term(parent_rep, rule, pos, direction)
        _, order = canonical(raw)
        inv = _inverse_perm(order)
        # the replaced fragment sits in the last factors of ``raw``
        _, dst = _sides(rule, direction)
        n = len(raw.factors)
        back_pos = tuple(inv[i] for i in range(n - len(dst.factors), n))
        back = RL if direction == LR else LR
        steps.append(Step("rule", rid, back, back_pos))
        undone = apply_term(rep, rule, back_pos, back)
        _, porder = canonical(undone)
        steps.append(Step("permute", sigma=tuple(porder)))
        key = parent
    steps.append(Step("permute", sigma=tuple(_inverse_perm(ob))))
    return DerivationCertificate(tuple(s for s in steps if not _trivial(s)))


def _trivial(s: Step) -> bool:
    return s.move == "permute" and list(s.sigma) == sorted(s.sigma)

"""The 32 defining relations as tensor equations over Vect.

Closed hom axes come in ``(l, r)`` pairs; here every such pair is flattened to
one index of dimension ``dim_l * dim_r``.  The Deligne functor ``T``, its
coherence map and the twist are then identities, and the braiding of two
closed factors is a plain swap of flattened indices.

R32 is not an einsum: it compares the two decompositions of the torus with
one closed in- and one closed out-boundary through the evaluator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .evaluator import Decomposition, SewingSolution, evaluate
from .generators import port_index
from .tensor import relative_residual

RELATION_IDS = tuple(range(1, 33))


def flat_tensors(sol: SewingSolution) -> dict[str, np.ndarray]:
    """Structure tensors with each (l, r) pair merged into one axis."""
    K = sol.L.dim_cl
    P = sol.L.dim_op
    f = sol.f
    return {
        "mo": f["mo"], "do": f["do"], "no": f["no"], "eo": f["eo"], "po": f["po"],
        "mc": f["mc"].reshape(K, K, K), "dc": f["dc"].reshape(K, K, K),
        "nc": f["nc"].reshape(K), "ec": f["ec"].reshape(K), "pc": f["pc"].reshape(K, K),
        "i": f["i"].reshape(P, K), "istar": f["istar"].reshape(K, P),
    }


def _sides(n: int, t: dict[str, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    e = np.einsum
    mo, do, no, eo, po = t["mo"], t["do"], t["no"], t["eo"], t["po"]
    mc, dc, nc, ec, pc = t["mc"], t["dc"], t["nc"], t["ec"], t["pc"]
    io, oi = t["i"], t["istar"]
    if n == 1:
        return e("cab,a->cb", mo, no), po
    if n == 2:
        return e("cab,b->ca", mo, no), po
    if n == 3:
        return e("x,xya->ya", eo, do), po
    if n == 4:
        return e("y,xya->xa", eo, do), po
    if n == 5:
        phi = e("c,cab->ab", eo, mo)
        return phi, phi.T
    if n == 6:
        return e("edc,dab->eabc", mo, mo), e("ead,dbc->eabc", mo, mo)
    if n == 7:
        return e("xyd,dza->xyza", do, do), e("yzd,xda->xyza", do, do)
    if n == 8:
        return e("xad,dyb->xyab", mo, do), e("xyd,dab->xyab", do, mo)
    if n == 9:
        return e("xda,ydb->xyab", do, mo), e("xyd,dab->xyab", do, mo)
    if n == 10:
        return e("cd,dab->cab", po, mo), mo
    if n == 11:
        return po @ no, no
    if n == 12:
        return e("xyd,da->xya", do, po), do
    if n == 13:
        return eo @ po, eo
    if n == 14:
        return e("cab,b->ca", mc, nc), pc
    if n == 15:
        return e("xya,y->xa", dc, ec), pc
    if n == 16:
        return e("edc,dab->eabc", mc, mc), e("ead,dbc->eabc", mc, mc)
    if n == 17:
        return e("xyd,dza->xyza", dc, dc), e("yzd,xda->xyza", dc, dc)
    if n == 18:
        return e("xad,dyb->xyab", mc, dc), e("xyd,dab->xyab", dc, mc)
    if n == 19:
        return e("xda,ydb->xyab", dc, mc), e("xyd,dab->xyab", dc, mc)
    if n == 20:
        return e("cab->cba", mc), mc
    if n == 21:
        return e("cd,dab->cab", pc, mc), mc
    if n == 22:
        return pc @ nc, nc
    if n == 23:
        return e("xyd,da->xya", dc, pc), dc
    if n == 24:
        return ec @ pc, ec
    if n == 25:
        return pc, pc
    if n == 26:
        phi = e("c,cab->ab", eo, mo)
        qc = e("pqn,n->pq", dc, nc)
        return e("xy,yp,pq->qx", phi, io, qc), oi
    if n == 27:
        psi_c = e("d,dpq->pq", ec, mc)
        qo = e("yzn,n->yz", do, no)
        return e("pq,qy,yz->zp", psi_c, oi, qo), io
    if n == 28:
        return e("cya,yp->cpa", mo, io), e("cay,yp->cpa", mo, io)
    if n == 29:
        return e("yd,dpq->ypq", io, mc), e("yuv,up,vq->ypq", mo, io, io)
    if n == 30:
        return io @ nc, no
    if n == 31:
        return io @ oi, e("yvu,uvx->yx", mo, do)
    raise KeyError(n)


def torus_decompositions() -> tuple[Decomposition, Decomposition]:
    """Two decompositions of the torus with one closed in and one closed out:
    through a coproduct-then-product pair, and through a product whose
    output feeds a coproduct with one leg looped back."""
    d0 = Decomposition(["dc", "mc"], [
        ((0, port_index("dc", "o", 0)), (1, port_index("mc", "i", 0))),
        ((0, port_index("dc", "o", 1)), (1, port_index("mc", "i", 1))),
    ])
    d1 = Decomposition(["mc", "dc"], [
        ((0, port_index("mc", "o", 0)), (1, port_index("dc", "i", 0))),
        ((1, port_index("dc", "o", 1)), (0, port_index("mc", "i", 1))),
    ], target=d0.target,
        matching=[(0, port_index("mc", "i", 0)), (1, port_index("dc", "o", 0))])
    return d0, d1


def relation_sides(sol: SewingSolution, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of relation ``n`` as arrays of equal shape."""
    if n == 32:
        d0, d1 = torus_decompositions()
        return evaluate(sol, d0).data, evaluate(sol, d1).data
    if n not in RELATION_IDS:
        raise KeyError(f"no relation R{n}")
    return _sides(n, flat_tensors(sol))


def check_relation(sol: SewingSolution, n: int) -> float:
    """Relative residual of relation ``n``."""
    lhs, rhs = relation_sides(sol, n)
    return relative_residual(lhs, rhs)


@dataclass
class RelationReport:
    residuals: dict[int, float]
    tol: float
    failing: list[int] = field(init=False)

    def __post_init__(self):
        self.failing = [n for n, r in self.residuals.items() if not r <= self.tol]

    @property
    def passed(self) -> bool:
        return not self.failing

    @property
    def first_failure(self) -> int | None:
        return self.failing[0] if self.failing else None

    def to_json(self) -> list[dict]:
        return [{"relation": n, "residual": r, "pass": r <= self.tol}
                for n, r in self.residuals.items()]


def check_all(sol: SewingSolution, tol: float = 1e-9) -> RelationReport:
    return RelationReport({n: check_relation(sol, n) for n in RELATION_IDS}, tol)


"""Frobenius and Cardy algebras in Vect, and the passage between Cardy
algebras with retracts and solutions of the sewing relations.

Structure tensors use the codomain-first layout: ``m[c, a, b]`` is the
coefficient of basis vector ``c`` in ``m(a, b)``, ``delta[x, y, a]`` that of
``x (x) y`` in ``delta(a)``.  A closed algebra lives on a single space
standing for ``T(A_cl)``; a retract embeds it into the flattened
``B_l (x) B_r``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    CardyFail,
    NondegeneracyFailure,
    NotCommutative,
    NotFrobenius,
    NotIdempotent,
    NotSymmetric,
    ParseError,
    RelationsFail,
    ShapeMismatch,
)
from .evaluator import SewingSolution
from .generators import hom_shape_dims
from .relations import check_all, check_relation, flat_tensors
from .tensor import LabelSpaces, Tensor, relative_residual


def _arr(x) -> np.ndarray:
    return np.asarray(getattr(x, "data", x), dtype=complex)


def _err(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    if a.size == 0:
        return 0.0
    return relative_residual(a, b)


# ---------------------------------------------------------------------------
# Frobenius algebras
# ---------------------------------------------------------------------------
class FrobeniusAlgebra:
    def __init__(self, m, eta, delta, eps):
        self.m, self.eta, self.delta, self.eps = (_arr(m), _arr(eta), _arr(delta), _arr(eps))
        n = self.eta.shape[0] if self.eta.ndim == 1 else -1
        if (self.m.shape != (n, n, n) or self.delta.shape != (n, n, n)
                or self.eps.shape != (n,)):
            raise ShapeMismatch(f"inconsistent structure tensor shapes m{self.m.shape} "
                                f"eta{self.eta.shape} delta{self.delta.shape} eps{self.eps.shape}")

    @property
    def dim(self) -> int:
        return self.eta.shape[0]

    @property
    def pairing(self) -> np.ndarray:
        """``Phi[a, b] = eps(m(a, b))``."""
        return np.einsum("c,cab->ab", self.eps, self.m)

    @property
    def copairing(self) -> np.ndarray:
        """``delta(eta)`` as a matrix."""
        return np.einsum("xya,a->xy", self.delta, self.eta)

    @classmethod
    def from_algebra(cls, m, eta, eps) -> "FrobeniusAlgebra":
        """Complete an algebra with a nondegenerate trace form to a Frobenius
        algebra; the coproduct is ``(m (x) id)(id (x) Phi^-1)``."""
        m, eta, eps = _arr(m), _arr(eta), _arr(eps)
        phi = np.einsum("c,cab->ab", eps, m)
        if phi.size and abs(np.linalg.det(phi)) < 1e-12 * max(1.0, np.linalg.norm(phi)) ** phi.shape[0]:
            raise NondegeneracyFailure("trace form is degenerate")
        q = np.linalg.inv(phi) if phi.size else phi
        delta = np.einsum("xau,uy->xya", m, q)
        return cls(m, eta, delta, eps)

    def scaled_counit(self, s: complex) -> "FrobeniusAlgebra":
        """Counit times ``s``, coproduct divided by ``s``."""
        return FrobeniusAlgebra(self.m, self.eta, self.delta / s, self.eps * s)

    def transport(self, e, r) -> "FrobeniusAlgebra":
        """Structure carried to another space along ``r: A -> B``, ``e: B -> A``
        with ``r e = id_B`` restricted to the image."""
        e, r = _arr(e), _arr(r)
        return FrobeniusAlgebra(
            np.einsum("uc,cab,ai,bj->uij", r, self.m, e, e),
            r @ self.eta,
            np.einsum("xi,yj,ija,ab->xyb", r, r, self.delta, e),
            self.eps @ e)

    def to_json(self) -> dict:
        return {k: Tensor(getattr(self, k)).to_json() for k in ("m", "eta", "delta", "eps")}

    @classmethod
    def from_json(cls, doc: dict) -> "FrobeniusAlgebra":
        try:
            return cls(*(Tensor.from_json(doc[k]).data for k in ("m", "eta", "delta", "eps")))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed Frobenius algebra: {exc}") from None


@dataclass
class AxiomReport:
    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def failing(self) -> list[str]:
        return [k for k, r in self.residuals.items() if not r <= self.tol]

    def to_json(self) -> dict:
        return {"pass": self.passed, "residuals": self.residuals, "tol": self.tol}


def _frobenius_residuals(A: FrobeniusAlgebra) -> dict[str, float]:
    e = np.einsum
    m, eta, d, eps = A.m, A.eta, A.delta, A.eps
    n = A.dim
    I = np.eye(n)
    return {
        "associativity": _err(e("edc,dab->eabc", m, m), e("ead,dbc->eabc", m, m)),
        "left_unit": _err(e("cab,a->cb", m, eta), I),
        "right_unit": _err(e("cab,b->ca", m, eta), I),
        "coassociativity": _err(e("xyd,dza->xyza", d, d), e("yzd,xda->xyza", d, d)),
        "left_counit": _err(e("x,xya->ya", eps, d), I),
        "right_counit": _err(e("y,xya->xa", eps, d), I),
        "frobenius_left": _err(e("xad,dyb->xyab", m, d), e("xyd,dab->xyab", d, m)),
        "frobenius_right": _err(e("xda,ydb->xyab", d, m), e("xyd,dab->xyab", d, m)),
    }


def check_frobenius(A: FrobeniusAlgebra, tol: float = 1e-9) -> AxiomReport:
    """Residual of every Frobenius axiom.  A degenerate trace form cannot come
    from a Frobenius structure and raises ``NondegeneracyFailure``."""
    if A.dim:
        phi = A.pairing
        s = np.linalg.svd(phi, compute_uv=False)
        if s[-1] <= tol * max(1.0, s[0]):
            raise NondegeneracyFailure(f"trace form eps o m is degenerate (smallest singular value {s[-1]:.3g})")
    return AxiomReport(_frobenius_residuals(A), tol)


def check_symmetric(A: FrobeniusAlgebra, tol: float = 1e-9) -> AxiomReport:
    # with trivial braiding the two maps to the dual are Phi and its transpose
    phi = A.pairing
    return AxiomReport({"symmetric": _err(phi, phi.T)}, tol)


def check_commutative(A: FrobeniusAlgebra, tol: float = 1e-9) -> AxiomReport:
    return AxiomReport({"commutative": _err(A.m, np.swapaxes(A.m, 1, 2))}, tol)


def dual_morphism(f, A: FrobeniusAlgebra, B: FrobeniusAlgebra) -> np.ndarray:
    """For ``f: A -> B`` the map ``f*: B -> A`` obtained by pairing with
    ``eps_B m_B`` on one side and the copairing of ``A`` on the other."""
    f = _arr(f)
    if f.shape != (B.dim, A.dim):
        raise ShapeMismatch(f"f has shape {f.shape}, expected {(B.dim, A.dim)}")
    return np.einsum("by,yi,ij->jb", B.pairing, f, A.copairing)


# ---------------------------------------------------------------------------
# Cardy algebras
# ---------------------------------------------------------------------------
class CardyAlgebra:
    """Open algebra, closed algebra and the closed-to-open map.

    ``iota_star`` defaults to the dual of ``iota``.  ``cardy_coefficient``
    scales the double-twist side of the Cardy condition; 1 is the Vect value.
    """

    def __init__(self, A_op: FrobeniusAlgebra, A_cl: FrobeniusAlgebra, iota, iota_star=None,
                 cardy_coefficient: complex = 1.0):
        self.A_op, self.A_cl = A_op, A_cl
        self.iota = _arr(iota)
        if self.iota.shape != (A_op.dim, A_cl.dim):
            raise ShapeMismatch(f"iota has shape {self.iota.shape}, expected {(A_op.dim, A_cl.dim)}")
        self.iota_star = (dual_morphism(self.iota, A_cl, A_op) if iota_star is None
                          else _arr(iota_star))
        if self.iota_star.shape != (A_cl.dim, A_op.dim):
            raise ShapeMismatch(f"iota_star has shape {self.iota_star.shape}")
        self.cardy_coefficient = complex(cardy_coefficient)

    def transport(self, op: tuple, cl: tuple) -> "CardyAlgebra":
        """Carry the structure along ``(e, r)`` pairs for both algebras."""
        (eo, ro), (ec, rc) = ((_arr(a), _arr(b)) for a, b in (op, cl))
        return CardyAlgebra(self.A_op.transport(eo, ro), self.A_cl.transport(ec, rc),
                            ro @ self.iota @ ec, rc @ self.iota_star @ eo, self.cardy_coefficient)

    def to_json(self) -> dict:
        return {"Aop": self.A_op.to_json(), "Acl": self.A_cl.to_json(),
                "iota": Tensor(self.iota).to_json(), "iotaStar": Tensor(self.iota_star).to_json(),
                "cardyCoefficient": [self.cardy_coefficient.real, self.cardy_coefficient.imag]}

    @classmethod
    def from_json(cls, doc: dict) -> "CardyAlgebra":
        try:
            kappa = doc.get("cardyCoefficient", [1.0, 0.0])
            return cls(FrobeniusAlgebra.from_json(doc["Aop"]), FrobeniusAlgebra.from_json(doc["Acl"]),
                       Tensor.from_json(doc["iota"]).data,
                       Tensor.from_json(doc["iotaStar"]).data if "iotaStar" in doc else None,
                       complex(kappa[0], kappa[1]))
        except (KeyError, TypeError, IndexError) as exc:
            raise ParseError(f"malformed Cardy algebra: {exc}") from None


@dataclass
class CardyReport:
    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def failing(self) -> list[str]:
        return [k for k, r in self.residuals.items() if not r <= self.tol]

    def to_json(self) -> dict:
        return {"pass": self.passed, "residuals": self.residuals, "tol": self.tol}


def check_cardy(C: CardyAlgebra, tol: float = 1e-9) -> CardyReport:
    """Centre, algebra-map, Cardy and modular-invariance conditions.

    Raises ``NotFrobenius``/``NotSymmetric``/``NotCommutative`` when the
    underlying algebras are not of the required kind."""
    Ao, Ac = C.A_op, C.A_cl
    for name, A in (("open", Ao), ("closed", Ac)):
        rep = check_frobenius(A, tol)
        if not rep.passed:
            raise NotFrobenius(f"{name} algebra fails {rep.failing}")
        if not check_symmetric(A, tol).passed:
            raise NotSymmetric(f"{name} algebra is not symmetric")
    if not check_commutative(Ac, tol).passed:
        raise NotCommutative("closed algebra is not commutative")
    e = np.einsum
    io, oi, mo = C.iota, C.iota_star, Ao.m
    res = {
        "centre": _err(e("cya,yp->cpa", mo, io), e("cay,yp->cpa", mo, io)),
        "iota_multiplicative": _err(e("yd,dpq->ypq", io, Ac.m), e("yuv,up,vq->ypq", mo, io, io)),
        "iota_unital": _err(io @ Ac.eta, Ao.eta),
        "iota_star_dual": _err(oi, dual_morphism(io, Ac, Ao)),
        "cardy": _err(io @ oi, C.cardy_coefficient * e("yvu,uvx->yx", mo, Ao.delta)),
    }
    if Ao.dim and Ac.dim:
        sol = _assemble(C, identity_retract(Ao.dim), identity_retract(Ac.dim),
                        LabelSpaces(Ao.dim, Ac.dim, 1))
        res["modular_invariance"] = check_relation(sol, 32)
    else:
        res["modular_invariance"] = 0.0
    return CardyReport(res, tol)


# ---------------------------------------------------------------------------
# retracts
# ---------------------------------------------------------------------------
@dataclass
class Retract:
    """``e: U -> B`` and ``r: B -> U`` with ``r e = id_U``."""
    e: np.ndarray
    r: np.ndarray
    tol: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        self.e, self.r = _arr(self.e), _arr(self.r)
        if self.e.ndim != 2 or self.r.shape != self.e.shape[::-1]:
            raise ShapeMismatch(f"retract maps of shapes {self.e.shape} and {self.r.shape}")
        k = self.e.shape[1]
        if k and np.linalg.norm(self.r @ self.e - np.eye(k)) > self.tol * max(1.0, np.sqrt(k)):
            raise NotIdempotent("r o e is not the identity")

    @property
    def dim(self) -> int:
        return self.e.shape[1]

    @property
    def ambient(self) -> int:
        return self.e.shape[0]

    @property
    def idempotent(self) -> np.ndarray:
        return self.e @ self.r

    def to_json(self) -> dict:
        return {"e": Tensor(self.e).to_json(), "r": Tensor(self.r).to_json()}

    @classmethod
    def from_json(cls, doc: dict) -> "Retract":
        try:
            return cls(Tensor.from_json(doc["e"]).data, Tensor.from_json(doc["r"]).data)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed retract: {exc}") from None


def identity_retract(n: int) -> Retract:
    return Retract(np.eye(n), np.eye(n))


def split_idempotent(p, tol: float = 1e-9) -> Retract:
    """Rank factorisation ``p = e r`` with ``r e = id``.

    ``e`` consists of the columns of ``p`` chosen by column-pivoted QR, taken
    in their original order; ``r`` is the least-squares coefficient map."""
    p = _arr(p)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ShapeMismatch(f"idempotent must be square, got {p.shape}")
    n = p.shape[0]
    scale = np.linalg.norm(p)
    if np.linalg.norm(p @ p - p) > tol * max(1.0, scale):
        raise NotIdempotent(f"|p o p - p| = {np.linalg.norm(p @ p - p):.3g}")
    if n == 0 or scale == 0.0:
        return Retract(np.zeros((n, 0)), np.zeros((0, n)))
    _, R, piv = scipy.linalg.qr(p, pivoting=True)
    diag = np.abs(np.diag(R))
    k = int(np.sum(diag > tol * scale))
    cols = sorted(piv[:k])
    e = p[:, cols]
    r = np.linalg.pinv(e) @ p
    return Retract(e, r, tol=max(tol, 1e-9))


# ---------------------------------------------------------------------------
# solutions <-> Cardy algebras
# ---------------------------------------------------------------------------
def _closed_shape(L: LabelSpaces, alpha: str, flat: np.ndarray) -> np.ndarray:
    return flat.reshape(hom_shape_dims(alpha, L.as_dict()))


def _assemble(C: CardyAlgebra, Rop: Retract, Rcl: Retract, L: LabelSpaces) -> SewingSolution:
    e = np.einsum
    eo, ro, ec, rc = Rop.e, Rop.r, Rcl.e, Rcl.r
    Ao, Ac = C.A_op, C.A_cl
    flat = {
        "mo": e("uc,cab,ai,bj->uij", eo, Ao.m, ro, ro),
        "do": e("xi,yj,ija,ab->xyb", eo, eo, Ao.delta, ro),
        "no": eo @ Ao.eta,
        "eo": Ao.eps @ ro,
        "po": eo @ ro,
        "mc": e("uc,cab,ai,bj->uij", ec, Ac.m, rc, rc),
        "dc": e("xi,yj,ija,ab->xyb", ec, ec, Ac.delta, rc),
        "nc": ec @ Ac.eta,
        "ec": Ac.eps @ rc,
        "pc": ec @ rc,
        "i": eo @ C.iota @ rc,
        "istar": ec @ C.iota_star @ ro,
    }
    return SewingSolution(L, {a: _closed_shape(L, a, t) for a, t in flat.items()})


def build_solution(C: CardyAlgebra, Rop: Retract, Rcl: Retract, L: LabelSpaces,
                   tol: float = 1e-9) -> SewingSolution:
    """Structure maps of ``C`` pushed into the label spaces along the
    retracts; ``f_po`` and ``f_pc`` are the two idempotents."""
    if Rop.ambient != L.dim_op or Rcl.ambient != L.dim_cl:
        raise ShapeMismatch(f"retracts land in dimensions ({Rop.ambient}, {Rcl.ambient}), "
                            f"label spaces have ({L.dim_op}, {L.dim_cl})")
    if Rop.dim != C.A_op.dim or Rcl.dim != C.A_cl.dim:
        raise ShapeMismatch("retract dimensions differ from the algebra dimensions")
    rep = check_cardy(C, tol)
    if not rep.passed:
        raise CardyFail(f"Cardy algebra fails {rep.failing}")
    return _assemble(C, Rop, Rcl, L)


def extract_with_retracts(sol: SewingSolution, Rop: Retract, Rcl: Retract) -> CardyAlgebra:
    """The Cardy algebra carried by the images of the given retracts."""
    e = np.einsum
    t = flat_tensors(sol)
    eo, ro, ec, rc = Rop.e, Rop.r, Rcl.e, Rcl.r
    A_op = FrobeniusAlgebra(e("uc,cab,ai,bj->uij", ro, t["mo"], eo, eo), ro @ t["no"],
                            e("xi,yj,ija,ab->xyb", ro, ro, t["do"], eo), t["eo"] @ eo)
    A_cl = FrobeniusAlgebra(e("uc,cab,ai,bj->uij", rc, t["mc"], ec, ec), rc @ t["nc"],
                            e("xi,yj,ija,ab->xyb", rc, rc, t["dc"], ec), t["ec"] @ ec)
    return CardyAlgebra(A_op, A_cl, ro @ t["i"] @ ec, rc @ t["istar"] @ eo)


def extract_cardy(sol: SewingSolution, tol: float = 1e-9) -> tuple[CardyAlgebra, Retract, Retract]:
    """Split ``f_po`` and ``f_pc`` and read off the Cardy algebra on their
    images.  Requires a solution of all relations."""
    rep = check_all(sol, tol)
    if not rep.passed:
        raise RelationsFail(f"relations {rep.failing} fail")
    t = flat_tensors(sol)
    Rop = split_idempotent(t["po"], tol)
    Rcl = split_idempotent(t["pc"], tol)
    return extract_with_retracts(sol, Rop, Rcl), Rop, Rcl


# ---------------------------------------------------------------------------
# isomorphisms between extractions
# ---------------------------------------------------------------------------
@dataclass
class CardyIsomorphism:
    phi_op: np.ndarray
    phi_cl: np.ndarray
    psi_op: np.ndarray
    psi_cl: np.ndarray
    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def iso_residuals(C: CardyAlgebra, D: CardyAlgebra, phi_op, phi_cl, psi_op, psi_cl) -> dict[str, float]:
    """How far ``(phi_op, phi_cl): C -> D`` is from an isomorphism of Cardy
    algebras with inverse ``(psi_op, psi_cl)``."""
    e = np.einsum
    res: dict[str, float] = {}
    for tag, A, B, phi, psi in (("op", C.A_op, D.A_op, phi_op, psi_op),
                                ("cl", C.A_cl, D.A_cl, phi_cl, psi_cl)):
        res[f"m_{tag}"] = _err(phi @ A.m.reshape(A.dim, -1),
                               e("cij,ia,jb->cab", B.m, phi, phi).reshape(B.dim, -1))
        res[f"eta_{tag}"] = _err(phi @ A.eta, B.eta)
        res[f"delta_{tag}"] = _err(e("xi,yj,ija->xya", phi, phi, A.delta), e("xyb,ba->xya", B.delta, phi))
        res[f"eps_{tag}"] = _err(B.eps @ phi, A.eps)
        res[f"inverse_{tag}"] = max(_err(psi @ phi, np.eye(A.dim)), _err(phi @ psi, np.eye(B.dim)))
    res["iota"] = _err(phi_op @ C.iota, D.iota @ phi_cl)
    res["iota_star"] = _err(phi_cl @ C.iota_star, D.iota_star @ phi_op)
    return res


def round_trip_iso(sol: SewingSolution, first: tuple[Retract, Retract] | None = None,
                   second: tuple[Retract, Retract] | None = None, seed: int = 0,
                   tol: float = 1e-9) -> CardyIsomorphism:
    """Isomorphism between the Cardy algebras extracted along two retract
    choices: ``(r' e, r e')`` for each of the two idempotents.

    ``first`` defaults to the split of ``f_po``/``f_pc``; ``second`` to the
    same split re-expressed in a seeded random basis."""
    C, Rop, Rcl = extract_cardy(sol, tol)
    if first is not None:
        Rop, Rcl = first
        C = extract_with_retracts(sol, Rop, Rcl)
    if second is None:
        rng = np.random.default_rng(seed)
        second = tuple(_rebase(R, rng) for R in (Rop, Rcl))
    Rop2, Rcl2 = second
    D = extract_with_retracts(sol, Rop2, Rcl2)
    phi_op, phi_cl = Rop2.r @ Rop.e, Rcl2.r @ Rcl.e
    psi_op, psi_cl = Rop.r @ Rop2.e, Rcl.r @ Rcl2.e
    res = iso_residuals(C, D, phi_op, phi_cl, psi_op, psi_cl)
    return CardyIsomorphism(phi_op, phi_cl, psi_op, psi_cl, res, tol)


def _rebase(R: Retract, rng: np.random.Generator) -> Retract:
    k = R.dim
    if k == 0:
        return R
    g = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    g = g + k * np.eye(k)
    return Retract(R.e @ g, np.linalg.solve(g, R.r))

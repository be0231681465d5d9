"""Test world sheets, each with several inequivalent decompositions.

Ports are written as ``(factor, "i0")`` for the first domain boundary of a
factor, ``(factor, "o1")`` for the second codomain boundary, and so on.
"""
from __future__ import annotations

from dataclasses import dataclass

from .evaluator import Decomposition
from .generators import port_index
from .relations import torus_decompositions
from .worldsheet import IN, OUT, OpenBoundary, disc


def _port(factors, ref):
    f, spec = ref
    return (f, port_index(factors[f], spec[0], int(spec[1:])))


def dec(factors, sewing, target=None, matching=None) -> Decomposition:
    """Decomposition from readable port names; ``sewing`` lists
    ``(out_factor, "oK", in_factor, "iK")``."""
    pairs = [(_port(factors, (a, pa)), _port(factors, (b, pb))) for a, pa, b, pb in sewing]
    m = None if matching is None else [_port(factors, r) for r in matching]
    return Decomposition(factors, pairs, target, m)


@dataclass
class CorpusSheet:
    name: str
    description: str
    decompositions: list[Decomposition]

    @property
    def target(self):
        return self.decompositions[0].target


def o4_target():
    """Disc whose boundary reads: open in, open out, open in, open out."""
    return disc(OpenBoundary(IN, 1), OpenBoundary(OUT, 2), OpenBoundary(IN, 3), OpenBoundary(OUT, 4))


def o4_decompositions() -> tuple[Decomposition, Decomposition]:
    """Two ways of writing the alternating four-boundary disc with a
    coproduct and a product.  Boundaries ``a, x, b, y`` in ord order."""
    t = o4_target()
    # coproduct on a; its first output multiplies b, its second output is x
    d1 = dec(["do", "mo"], [(0, "o0", 1, "i0")], t,
             [(0, "i0"), (0, "o1"), (1, "i1"), (1, "o0")])
    # coproduct on b; its first output is x, its second is multiplied by a
    d2 = dec(["do", "mo"], [(0, "o1", 1, "i1")], t,
             [(1, "i0"), (0, "o0"), (0, "i0"), (1, "o0")])
    return d1, d2


def oco_io_decompositions() -> tuple[Decomposition, Decomposition]:
    """A closed input fed into either input of the open product."""
    d1 = dec(["i", "mo"], [(0, "o0", 1, "i0")])
    d2 = dec(["i", "mo"], [(0, "o0", 1, "i1")], d1.target, [(1, "i0"), (1, "o0"), (0, "i0")])
    return d1, d2


def oco_oi_decompositions() -> tuple[Decomposition, Decomposition]:
    """Either output of the open coproduct sent to a closed output."""
    d1 = dec(["do", "istar"], [(0, "o0", 1, "i0")])
    d2 = dec(["do", "istar"], [(0, "o1", 1, "i0")], d1.target, [(0, "i0"), (0, "o0"), (1, "o0")])
    return d1, d2


def mixed_sphere_decompositions() -> list[Decomposition]:
    """Genus 0 with one open in and one open out on one circle, one closed
    in and one closed out."""
    d1 = dec(["i", "mo", "do", "istar"],
             [(0, "o0", 1, "i0"), (1, "o0", 2, "i0"), (2, "o0", 3, "i0")])
    t = d1.target
    d2 = dec(["dc", "i", "mo"], [(0, "o1", 1, "i0"), (1, "o0", 2, "i0")],
             t, [(2, "i1"), (2, "o0"), (0, "i0"), (0, "o0")])
    d3 = dec(["do", "istar", "mc"], [(0, "o1", 1, "i0"), (1, "o0", 2, "i1")],
             t, [(0, "i0"), (0, "o0"), (2, "i0"), (2, "o0")])
    return [d1, d2, d3]


def grouped_disc_decompositions() -> list[Decomposition]:
    """Disc with two inputs then two outputs: product then coproduct, and
    the two mixed orders."""
    d1 = dec(["mo", "do"], [(0, "o0", 1, "i0")])
    t = d1.target
    d2 = dec(["mo", "do"], [(1, "o0", 0, "i1")], t, [(0, "i0"), (1, "i0"), (1, "o1"), (0, "o0")])
    d3 = dec(["do", "mo"], [(0, "o1", 1, "i0")], t, [(0, "i0"), (1, "i1"), (1, "o0"), (0, "o0")])
    return [d1, d2, d3]


def three_in_disc_decompositions() -> list[Decomposition]:
    d1 = dec(["mo", "mo"], [(0, "o0", 1, "i0")])
    d2 = dec(["mo", "mo"], [(0, "o0", 1, "i1")], d1.target, [(1, "i0"), (0, "i0"), (0, "i1"), (1, "o0")])
    return [d1, d2]


def cardy_annulus_decompositions() -> list[Decomposition]:
    d1 = dec(["istar", "i"], [(0, "o0", 1, "i0")])
    d2 = dec(["do", "mo"], [(0, "o0", 1, "i1"), (0, "o1", 1, "i0")], d1.target, [(0, "i0"), (1, "o0")])
    d3 = dec(["istar", "pc", "i"], [(0, "o0", 1, "i0"), (1, "o0", 2, "i0")], d1.target,
             [(0, "i0"), (2, "o0")])
    return [d1, d2, d3]


def closed_torus_one_hole() -> list[Decomposition]:
    d1 = dec(["mc"], [(0, "o0", 0, "i0")])
    d2 = dec(["mc"], [(0, "o0", 0, "i1")], d1.target, [(0, "i0")])
    return [d1, d2]


def closed_four_holed_sphere() -> list[Decomposition]:
    d1 = dec(["mc", "mc"], [(0, "o0", 1, "i0")])
    d2 = dec(["mc", "mc"], [(0, "o0", 1, "i1")], d1.target, [(1, "i0"), (0, "i0"), (0, "i1"), (1, "o0")])
    return [d1, d2]


def open_annulus() -> list[Decomposition]:
    d1 = dec(["po"], [(0, "o0", 0, "i0")])
    d2 = dec(["no", "do", "mo", "eo"],
             [(0, "o0", 1, "i0"), (1, "o0", 2, "i1"), (1, "o1", 2, "i0"), (2, "o0", 3, "i0")],
             d1.target, [])
    return [d1, d2]


def sphere() -> list[Decomposition]:
    d1 = dec(["nc", "ec"], [(0, "o0", 1, "i0")])
    d2 = dec(["nc", "pc", "ec"], [(0, "o0", 1, "i0"), (1, "o0", 2, "i0")], d1.target, [])
    return [d1, d2]


def closed_torus() -> list[Decomposition]:
    d1 = dec(["pc"], [(0, "o0", 0, "i0")])
    d2 = dec(["nc", "dc", "mc", "ec"],
             [(0, "o0", 1, "i0"), (1, "o0", 2, "i0"), (1, "o1", 2, "i1"), (2, "o0", 3, "i0")],
             d1.target, [])
    return [d1, d2]


def build_corpus() -> list[CorpusSheet]:
    t0, t1 = torus_decompositions()
    return [
        CorpusSheet("o4", "alternating four-boundary open disc", list(o4_decompositions())),
        CorpusSheet("oco-io", "closed in, open in, open out", list(oco_io_decompositions())),
        CorpusSheet("oco-oi", "open in, open out, closed out", list(oco_oi_decompositions())),
        CorpusSheet("torus-2", "torus with one closed in and one closed out", [t0, t1]),
        CorpusSheet("mixed-sphere", "genus 0, two open and two closed boundaries",
                    mixed_sphere_decompositions()),
        CorpusSheet("disc-2-2", "disc with two open ins followed by two open outs",
                    grouped_disc_decompositions()),
        CorpusSheet("disc-3-1", "disc with three open ins and one open out",
                    three_in_disc_decompositions()),
        CorpusSheet("cardy-annulus", "annulus with an open in and an open out on different circles",
                    cardy_annulus_decompositions()),
        CorpusSheet("torus-1", "torus with one closed in", closed_torus_one_hole()),
        CorpusSheet("sphere-4", "sphere with three closed ins and one closed out",
                    closed_four_holed_sphere()),
        CorpusSheet("open-annulus", "annulus with two physical boundary circles", open_annulus()),
        CorpusSheet("sphere", "closed sphere", sphere()),
        CorpusSheet("closed-torus", "closed torus", closed_torus()),
    ]

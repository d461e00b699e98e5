"""Local relabelings of boxes: output flips, input swaps, party exchange.

The group has order 128: per party an output relabeling a -> a XOR f*x XOR g
(4 choices) and an input swap (2 choices), plus the party exchange.  These
relabelings permute the 24 polytope vertices and realize every reachable
sign pattern of a correlator vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields

import numpy as np

from .boxes import CorrelatorVector, JointBox


@dataclass(frozen=True)
class SymmetryElement:
    """One relabeling.

    Output maps use the post-swap inputs: Alice's new output is
    a XOR flip_a_x * x XOR flip_a_const, and likewise for Bob with y.
    When swap_parties is set the roles (a, x) <-> (b, y) are exchanged
    before inputs are swapped and outputs flipped.
    """

    flip_a_const: int = 0
    flip_a_x: int = 0
    flip_b_const: int = 0
    flip_b_y: int = 0
    swap_x: int = 0
    swap_y: int = 0
    swap_parties: int = 0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) not in (0, 1):
                raise ValueError(f"{f.name} must be 0 or 1")

    @classmethod
    def identity(cls) -> "SymmetryElement":
        return cls()


def all_elements() -> list[SymmetryElement]:
    """All 128 elements, in a fixed lexicographic flag order."""
    return [SymmetryElement(*bits) for bits in itertools.product((0, 1), repeat=7)]


def apply_symmetry(box: JointBox, g: SymmetryElement) -> JointBox:
    """Relabeled box; preserves validity and non-signalling."""
    p = box.p
    q = np.empty((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    aa = a ^ (g.flip_a_x & x) ^ g.flip_a_const
                    bb = b ^ (g.flip_b_y & y) ^ g.flip_b_const
                    xx = x ^ g.swap_x
                    yy = y ^ g.swap_y
                    if g.swap_parties:
                        q[a, b, x, y] = p[bb, aa, yy, xx]
                    else:
                        q[a, b, x, y] = p[aa, bb, xx, yy]
    return JointBox(q)


def correlator_action(g: SymmetryElement, c: CorrelatorVector) -> CorrelatorVector:
    """Induced map on correlators: sign flips, row/column swaps, transpose."""
    m = c.as_matrix()
    out = np.empty((2, 2))
    for x in range(2):
        for y in range(2):
            sign = (-1.0) ** (
                (g.flip_a_x & x) ^ g.flip_a_const ^ (g.flip_b_y & y) ^ g.flip_b_const
            )
            xx = x ^ g.swap_x
            yy = y ^ g.swap_y
            out[x, y] = sign * (m[yy, xx] if g.swap_parties else m[xx, yy])
    return CorrelatorVector.from_matrix(out)


# ---------------------------------------------------------------------------
# group structure via the induced permutation of the 16 table cells
# ---------------------------------------------------------------------------

def _flat(a, b, x, y) -> int:
    return ((a * 2 + b) * 2 + x) * 2 + y


def _cell_perm(g: SymmetryElement) -> tuple[int, ...]:
    """perm such that apply_symmetry(box, g).p.flat[i] == box.p.flat[perm[i]]."""
    perm = [0] * 16
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    aa = a ^ (g.flip_a_x & x) ^ g.flip_a_const
                    bb = b ^ (g.flip_b_y & y) ^ g.flip_b_const
                    xx = x ^ g.swap_x
                    yy = y ^ g.swap_y
                    if g.swap_parties:
                        src = _flat(bb, aa, yy, xx)
                    else:
                        src = _flat(aa, bb, xx, yy)
                    perm[_flat(a, b, x, y)] = src
    return tuple(perm)


_PERM_TO_ELEMENT: dict[tuple[int, ...], SymmetryElement] = {}


def _perm_table() -> dict[tuple[int, ...], SymmetryElement]:
    if not _PERM_TO_ELEMENT:
        for g in all_elements():
            _PERM_TO_ELEMENT[_cell_perm(g)] = g
    return _PERM_TO_ELEMENT


def compose(first: SymmetryElement, second: SymmetryElement) -> SymmetryElement:
    """The element acting like `first` followed by `second`."""
    pf, ps = _cell_perm(first), _cell_perm(second)
    combined = tuple(pf[ps[i]] for i in range(16))
    return _perm_table()[combined]


def inverse(g: SymmetryElement) -> SymmetryElement:
    perm = _cell_perm(g)
    inv = [0] * 16
    for i, j in enumerate(perm):
        inv[j] = i
    return _perm_table()[tuple(inv)]


def canonicalize(
    c: CorrelatorVector,
) -> tuple[SymmetryElement, CorrelatorVector]:
    """Pick the orbit element with c00, c10, c01 >= 0 and c11 <= 0.

    Among relabelings achieving that sign pattern, the one maximizing
    (c00+c10)^2 + (c01-c11)^2 is returned.  Some orbits contain no such
    pattern (the product of the four correlator signs is invariant); the
    maximizer over the whole orbit is returned then.
    """
    best: tuple[SymmetryElement, CorrelatorVector] | None = None
    best_key: tuple[int, float] | None = None
    for g in all_elements():
        img = correlator_action(g, c)
        pattern = int(
            img.c00 >= 0 and img.c10 >= 0 and img.c01 >= 0 and img.c11 <= 0
        )
        value = (img.c00 + img.c10) ** 2 + (img.c01 - img.c11) ** 2
        key = (pattern, value)
        if best_key is None or key > best_key:
            best, best_key = (g, img), key
    assert best is not None
    return best

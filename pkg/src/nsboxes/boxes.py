"""Two-input/two-output bipartite correlation boxes.

A box is the conditional probability table P(a,b|x,y) with binary inputs
x, y and binary outputs a, b.  The non-signalling polytope in this scenario
has 24 vertices: 8 extreme non-local boxes and 16 local deterministic ones.
This module builds, validates, mixes, samples and serializes such boxes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: absolute tolerance for normalization / non-signalling checks on float tables
TABLE_TOL = 1e-12


class NegativeWeight(ValueError):
    """A mixture weight is negative."""


class WeightSumMismatch(ValueError):
    """Mixture weights do not sum to one."""


class SignallingBox(ValueError):
    """One-party marginals depend on the other party's input."""


@dataclass(frozen=True)
class NonlocalLabel:
    """Label (mu, nu, sigma) of an extreme non-local box.

    The box puts weight 1/2 on every outcome pair with
    a XOR b = x*y XOR mu*x XOR nu*y XOR sigma.
    """

    mu: int
    nu: int
    sigma: int

    def __post_init__(self):
        for bit in (self.mu, self.nu, self.sigma):
            if bit not in (0, 1):
                raise ValueError(f"label bits must be 0 or 1, got {bit}")

    @property
    def name(self) -> str:
        return f"NL{self.mu}{self.nu}{self.sigma}"

    @classmethod
    def parse(cls, name: str) -> "NonlocalLabel":
        if len(name) != 5 or not name.startswith("NL"):
            raise ValueError(f"not a non-local vertex name: {name!r}")
        return cls(*(int(ch) for ch in name[2:]))


@dataclass(frozen=True)
class LocalLabel:
    """Label (mu, nu, sigma, tau) of a local deterministic box.

    The box outputs a = mu*x XOR nu and b = sigma*y XOR tau with certainty.
    """

    mu: int
    nu: int
    sigma: int
    tau: int

    def __post_init__(self):
        for bit in (self.mu, self.nu, self.sigma, self.tau):
            if bit not in (0, 1):
                raise ValueError(f"label bits must be 0 or 1, got {bit}")

    @property
    def name(self) -> str:
        return f"L{self.mu}{self.nu}{self.sigma}{self.tau}"

    @classmethod
    def parse(cls, name: str) -> "LocalLabel":
        if len(name) != 5 or not name.startswith("L"):
            raise ValueError(f"not a local vertex name: {name!r}")
        return cls(*(int(ch) for ch in name[1:]))


@dataclass(frozen=True)
class CorrelatorVector:
    """The four correlators C_xy = P(a=b|x,y) - P(a!=b|x,y)."""

    c00: float
    c01: float
    c10: float
    c11: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c00, self.c01, self.c10, self.c11)

    def as_matrix(self) -> np.ndarray:
        """2x2 matrix indexed [x, y]."""
        return np.array([[self.c00, self.c01], [self.c10, self.c11]])

    @classmethod
    def from_matrix(cls, m) -> "CorrelatorVector":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))


@dataclass(frozen=True, eq=False)
class JointBox:
    """Probability table p[a, b, x, y].

    The table is stored as a read-only float array.  Construction does not
    validate; use :func:`validate` to check normalization, positivity and
    the non-signalling conditions (constructors in this module only ever
    produce valid tables).
    """

    p: np.ndarray

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        if arr.shape != (2, 2, 2, 2):
            raise ValueError(f"box table must have shape (2,2,2,2), got {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "p", arr)

    def prob(self, a: int, b: int, x: int, y: int) -> float:
        return float(self.p[a, b, x, y])


def make_nonlocal(label: NonlocalLabel) -> JointBox:
    """Extreme non-local box: p = 1/2 iff a XOR b = x*y XOR mu*x XOR nu*y XOR sigma."""
    p = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    if a ^ b == (x & y) ^ (label.mu & x) ^ (label.nu & y) ^ label.sigma:
                        p[a, b, x, y] = 0.5
    return JointBox(p)


def make_local(label: LocalLabel) -> JointBox:
    """Local deterministic box: a = mu*x XOR nu, b = sigma*y XOR tau."""
    p = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            a = (label.mu & x) ^ label.nu
            b = (label.sigma & y) ^ label.tau
            p[a, b, x, y] = 1.0
    return JointBox(p)


def pr_box() -> JointBox:
    """The PR box, maximal CHSH violator: a XOR b = x*y."""
    return make_nonlocal(NonlocalLabel(0, 0, 0))


def maximally_mixed() -> JointBox:
    """Completely depolarized box: every entry 1/4."""
    return JointBox(np.full((2, 2, 2, 2), 0.25))


def mix(terms: Iterable[tuple[float, JointBox]]) -> JointBox:
    """Convex combination of boxes.

    Weights must be non-negative and sum to one within TABLE_TOL.
    """
    terms = list(terms)
    total = 0.0
    acc = np.zeros((2, 2, 2, 2))
    for weight, box in terms:
        if weight < -TABLE_TOL:
            raise NegativeWeight(f"negative mixture weight {weight}")
        total += weight
        acc += weight * box.p
    if abs(total - 1.0) > TABLE_TOL:
        raise WeightSumMismatch(f"mixture weights sum to {total}, expected 1")
    return JointBox(acc)


def correlators_of(box: JointBox) -> CorrelatorVector:
    """C_xy = sum_{a=b} p - sum_{a!=b} p for each input pair."""
    p = box.p
    c = np.zeros((2, 2))
    for x in range(2):
        for y in range(2):
            c[x, y] = p[0, 0, x, y] + p[1, 1, x, y] - p[0, 1, x, y] - p[1, 0, x, y]
    return CorrelatorVector.from_matrix(c)


def box_from_correlators(c: CorrelatorVector) -> JointBox:
    """Unbiased box with the given correlators: p = (1 + (-1)^(a XOR b) C_xy) / 4."""
    m = c.as_matrix()
    if np.any(np.abs(m) > 1 + TABLE_TOL):
        raise ValueError("correlators must lie in [-1, 1]")
    p = np.empty((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            sign = 1.0 if a == b else -1.0
            p[a, b] = (1.0 + sign * m) / 4.0
    return JointBox(np.clip(p, 0.0, None))


def isotropic_box(bias: float) -> JointBox:
    """Noisy PR box with correlators (bias, bias, bias, -bias).

    bias = 1 is the PR box, 0 the maximally mixed box, 1/sqrt(2) the
    strongest quantum-admissible point of the line.
    """
    return box_from_correlators(CorrelatorVector(bias, bias, bias, -bias))


@dataclass(frozen=True)
class Marginals:
    """One-party marginals of a non-signalling box.

    p_a_given_x[x, a] = P(a|x) and p_b_given_y[y, b] = P(b|y).
    """

    p_a_given_x: np.ndarray
    p_b_given_y: np.ndarray
    unbiased: bool


def marginals_of(box: JointBox, tol: float = TABLE_TOL) -> Marginals:
    """One-party marginals; raises SignallingBox if they are input-dependent."""
    p = box.p
    # marginal of a computed separately for y=0 and y=1; they must agree
    pa = p.sum(axis=1)  # [a, x, y]
    pb = p.sum(axis=0)  # [b, x, y]
    res_a = np.max(np.abs(pa[:, :, 0] - pa[:, :, 1]))
    res_b = np.max(np.abs(pb[:, 0, :] - pb[:, 1, :]))
    if max(res_a, res_b) > tol:
        raise SignallingBox(
            f"marginals depend on the remote input (residual {max(res_a, res_b):.3g})"
        )
    p_a_given_x = pa[:, :, 0].T.copy()  # [x, a]
    p_b_given_y = pb[:, 0, :].T.copy()  # [y, b]
    unbiased = bool(
        np.all(np.abs(p_a_given_x - 0.5) <= tol)
        and np.all(np.abs(p_b_given_y - 0.5) <= tol)
    )
    return Marginals(p_a_given_x, p_b_given_y, unbiased)


@dataclass(frozen=True)
class ValidationReport:
    """Residuals and verdicts for the box axioms."""

    normalization_residual: float
    positivity_residual: float
    signalling_residual: float
    normalized: bool
    positive: bool
    nonsignalling: bool

    @property
    def ok(self) -> bool:
        return self.normalized and self.positive and self.nonsignalling

    def to_dict(self) -> dict:
        return {
            "normalization_residual": self.normalization_residual,
            "positivity_residual": self.positivity_residual,
            "signalling_residual": self.signalling_residual,
            "normalized": self.normalized,
            "positive": self.positive,
            "nonsignalling": self.nonsignalling,
            "ok": self.ok,
        }


def validate(box: JointBox, tol: float = TABLE_TOL) -> ValidationReport:
    """Report max deviations from normalization, positivity and non-signalling."""
    p = box.p
    norm_res = float(np.max(np.abs(p.sum(axis=(0, 1)) - 1.0)))
    pos_res = float(max(0.0, -p.min()))
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    sig_res = float(
        max(
            np.max(np.abs(pa[:, :, 0] - pa[:, :, 1])),
            np.max(np.abs(pb[:, 0, :] - pb[:, 1, :])),
        )
    )
    return ValidationReport(
        normalization_residual=norm_res,
        positivity_residual=pos_res,
        signalling_residual=sig_res,
        normalized=norm_res <= tol,
        positive=pos_res <= tol,
        nonsignalling=sig_res <= tol,
    )


def sample(box: JointBox, x: int, y: int, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one outcome pair (a, b) from p(.,.|x,y)."""
    u = rng.random()
    acc = 0.0
    for a in range(2):
        for b in range(2):
            acc += box.p[a, b, x, y]
            if u < acc:
                return a, b
    return 1, 1  # u landed in the rounding gap at the top


def sample_many(
    box: JointBox, x: int, y: int, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sampling: arrays of a- and b-outcomes of length `size`."""
    flat = box.p[:, :, x, y].reshape(4)
    flat = flat / flat.sum()
    draws = rng.choice(4, size=size, p=flat)
    return draws // 2, draws % 2


# ---------------------------------------------------------------------------
# vertex census and serialization
# ---------------------------------------------------------------------------

def vertex_names() -> list[str]:
    """The 24 vertex names: NL000..NL111 then L0000..L1111."""
    names = [f"NL{m}{n}{s}" for m in (0, 1) for n in (0, 1) for s in (0, 1)]
    names = sorted(names)
    names += sorted(
        f"L{m}{n}{s}{t}"
        for m in (0, 1)
        for n in (0, 1)
        for s in (0, 1)
        for t in (0, 1)
    )
    return names


def vertex_box(name: str) -> JointBox:
    """Build a vertex from its compact name (e.g. 'NL000' or 'L0101')."""
    if name.startswith("NL"):
        return make_nonlocal(NonlocalLabel.parse(name))
    if name.startswith("L"):
        return make_local(LocalLabel.parse(name))
    raise ValueError(f"unknown vertex name: {name!r}")


def enumerate_vertices() -> list[tuple[str, JointBox]]:
    return [(name, vertex_box(name)) for name in vertex_names()]


def box_to_dict(box: JointBox, meta: str | None = None) -> dict:
    """JSON form: 16 probabilities in (x, y, a, b) row-major order."""
    flat = box.p.transpose(2, 3, 0, 1).reshape(16)
    d: dict = {"p": [float(v) for v in flat]}
    if meta is not None:
        d["meta"] = meta
    return d


def box_from_dict(d: dict) -> JointBox:
    flat = np.asarray(d["p"], dtype=float)
    if flat.shape != (16,):
        raise ValueError("box JSON must carry exactly 16 probabilities")
    return JointBox(flat.reshape(2, 2, 2, 2).transpose(2, 3, 0, 1))

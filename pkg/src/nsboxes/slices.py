"""Two-parameter mixture slices through the non-signalling polytope.

A slice family mixes one extreme non-local box (weight lambda) with a second
vertex (weight eta) and completely depolarizing noise (the rest).  Correlators
of such mixtures have closed forms, linear in the weights, so criterion
regions can be swept on a grid and criterion boundaries located by bisection
along rays from the noise point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO, Union

import numpy as np

from . import criteria
from .boxes import (
    CorrelatorVector,
    JointBox,
    LocalLabel,
    NonlocalLabel,
    make_local,
    make_nonlocal,
    maximally_mixed,
    mix,
)

SecondLabel = Union[NonlocalLabel, LocalLabel, None]


class InvalidWeights(ValueError):
    """Mixture weights are negative or exceed the simplex."""


class NonMonotoneAlongRay(RuntimeError):
    """A criterion changes verdict more than once along a ray."""


def _check_weights(lam: float, eta: float) -> None:
    if lam < 0 or eta < 0 or lam + eta > 1 + 1e-12:
        raise InvalidWeights(f"need lambda, eta >= 0 and lambda+eta <= 1, got ({lam}, {eta})")


def _nl_signs(label: NonlocalLabel) -> np.ndarray:
    """Correlator matrix of an extreme non-local box: (-1)^(xy + mu x + nu y + sigma)."""
    s = np.empty((2, 2))
    for x in range(2):
        for y in range(2):
            s[x, y] = (-1.0) ** ((x & y) ^ (label.mu & x) ^ (label.nu & y) ^ label.sigma)
    return s


def _local_signs(label: LocalLabel) -> np.ndarray:
    """Correlator matrix of a deterministic box: (-1)^(a XOR b) with a = mu x + nu, b = sigma y + tau."""
    s = np.empty((2, 2))
    for x in range(2):
        for y in range(2):
            s[x, y] = (-1.0) ** ((label.mu & x) ^ label.nu ^ (label.sigma & y) ^ label.tau)
    return s


def case_a_correlators(
    base: NonlocalLabel, other: NonlocalLabel, lam: float, eta: float
) -> CorrelatorVector:
    """Closed-form correlators of lam*NL(base) + eta*NL(other) + noise."""
    _check_weights(lam, eta)
    m = lam * _nl_signs(base) + eta * _nl_signs(other)
    return CorrelatorVector.from_matrix(m)


def case_b_correlators(
    base: NonlocalLabel, other: LocalLabel, lam: float, eta: float
) -> CorrelatorVector:
    """Closed-form correlators of lam*NL(base) + eta*L(other) + noise."""
    _check_weights(lam, eta)
    m = lam * _nl_signs(base) + eta * _local_signs(other)
    return CorrelatorVector.from_matrix(m)


def _parse_second(token: str) -> SecondLabel:
    if token.startswith("NL"):
        return NonlocalLabel.parse(token)
    return LocalLabel.parse(token)


@dataclass(frozen=True)
class MixtureFamily:
    """A slice family: base non-local vertex plus an optional second vertex.

    With second=None the eta weight is spent on extra noise, so the family
    degenerates to the one-parameter isotropic line of the base vertex.
    """

    base: NonlocalLabel
    second: SecondLabel = None

    @property
    def name(self) -> str:
        if self.second is None:
            return self.base.name
        return f"{self.base.name}+{self.second.name}"

    @classmethod
    def parse(cls, spec: str) -> "MixtureFamily":
        parts = spec.split("+")
        if len(parts) == 1:
            return cls(NonlocalLabel.parse(parts[0]))
        if len(parts) == 2:
            return cls(NonlocalLabel.parse(parts[0]), _parse_second(parts[1]))
        raise ValueError(f"cannot parse family spec {spec!r}")

    def correlators(self, lam: float, eta: float) -> CorrelatorVector:
        if self.second is None:
            _check_weights(lam, eta)
            return CorrelatorVector.from_matrix(lam * _nl_signs(self.base))
        if isinstance(self.second, NonlocalLabel):
            return case_a_correlators(self.base, self.second, lam, eta)
        return case_b_correlators(self.base, self.second, lam, eta)

    def box(self, lam: float, eta: float) -> JointBox:
        """The mixture itself (constructive route, for cross-checks and sampling)."""
        _check_weights(lam, eta)
        terms = [(lam, make_nonlocal(self.base))]
        if self.second is None:
            terms.append((1.0 - lam, maximally_mixed()))
        else:
            second_box = (
                make_nonlocal(self.second)
                if isinstance(self.second, NonlocalLabel)
                else make_local(self.second)
            )
            terms.append((eta, second_box))
            terms.append((1.0 - lam - eta, maximally_mixed()))
        return mix(terms)


@dataclass(frozen=True)
class MixtureSpec:
    """One point of a mixture family: labels plus the two weights."""

    base: NonlocalLabel
    second: SecondLabel
    lam: float
    eta: float

    def __post_init__(self):
        if self.lam < 0 or self.eta < 0:
            raise InvalidWeights(f"negative weight in ({self.lam}, {self.eta})")
        if self.lam + self.eta > 1 + 1e-12:
            raise InvalidWeights(f"lambda + eta = {self.lam + self.eta} exceeds 1")

    @property
    def family(self) -> MixtureFamily:
        return MixtureFamily(self.base, self.second)

    def correlators(self) -> CorrelatorVector:
        return self.family.correlators(self.lam, self.eta)

    def box(self) -> JointBox:
        return self.family.box(self.lam, self.eta)


# ---------------------------------------------------------------------------
# grid sweeps
# ---------------------------------------------------------------------------

#: bit layout of the per-cell classification flags
FLAG_LOCAL = 1       # CHSH local bound holds
FLAG_TLM = 2         # Landau quantumness condition holds
FLAG_IC = 4          # information-causality quadratic holds
FLAG_NLS = 8         # swapping quadratic holds
FLAG_THIRD = 16      # third quadratic holds
FLAG_IN_POLYTOPE = 32  # lambda + eta <= 1

SWEEP_COLUMNS = (
    "lambda", "eta", "c00", "c01", "c10", "c11",
    "b_max", "tlm_a", "tlm_rhs", "s_ic", "s_nls", "s_third", "flags",
)


def fmt12(x: float) -> str:
    """Floats rendered with 12 significant digits."""
    return f"{x:.12g}"


@dataclass(frozen=True)
class SliceGrid:
    """Classified (lambda, eta) grid of one mixture family.

    values maps column names to 2-D arrays indexed [i_lambda, j_eta]; flags
    carries the FLAG_* bits, with 0 marking out-of-polytope cells.
    """

    family: MixtureFamily
    lambdas: np.ndarray
    etas: np.ndarray
    flags: np.ndarray
    values: dict[str, np.ndarray]

    @property
    def resolution(self) -> int:
        return len(self.lambdas)

    def in_polytope(self) -> np.ndarray:
        return (self.flags & FLAG_IN_POLYTOPE) != 0

    def to_csv(self, stream: TextIO) -> None:
        """One row per in-polytope cell, lambda-major."""
        stream.write(",".join(SWEEP_COLUMNS) + "\n")
        inside = self.in_polytope()
        for i, lam in enumerate(self.lambdas):
            for j, eta in enumerate(self.etas):
                if not inside[i, j]:
                    continue
                cells = [fmt12(lam), fmt12(eta)]
                for col in SWEEP_COLUMNS[2:-1]:
                    cells.append(fmt12(self.values[col][i, j]))
                cells.append(str(int(self.flags[i, j])))
                stream.write(",".join(cells) + "\n")

    def region_codes(self) -> np.ndarray:
        """0 out, 1 local, 2 quantum (non-local), 3 IC-only, 4 beyond IC."""
        codes = np.zeros(self.flags.shape, dtype=int)
        inside = self.in_polytope()
        local = (self.flags & FLAG_LOCAL) != 0
        tlm_ok = (self.flags & FLAG_TLM) != 0
        ic_ok = (self.flags & FLAG_IC) != 0
        codes[inside] = 4
        codes[inside & ic_ok] = 3
        codes[inside & tlm_ok] = 2
        codes[inside & local] = 1
        return codes

    def to_svg(self) -> str:
        return grid_to_svg(self)


def sweep(family: MixtureFamily, resolution: int = 201,
          tol: float = criteria.VERDICT_TOL) -> SliceGrid:
    """Classify every grid cell of the (lambda, eta) simplex."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    lambdas = np.linspace(0.0, 1.0, resolution)
    etas = np.linspace(0.0, 1.0, resolution)
    lam_g, eta_g = np.meshgrid(lambdas, etas, indexing="ij")

    u = _nl_signs(family.base)
    if family.second is None:
        v = np.zeros((2, 2))
    elif isinstance(family.second, NonlocalLabel):
        v = _nl_signs(family.second)
    else:
        v = _local_signs(family.second)

    c = {}
    for x in range(2):
        for y in range(2):
            c[f"c{x}{y}"] = lam_g * u[x, y] + eta_g * v[x, y]
    corr = (c["c00"], c["c01"], c["c10"], c["c11"])

    _, _, _, _, b_max = criteria.chsh_values(*corr)
    tlm_a, tlm_rhs = criteria.tlm_values(*corr)
    s_ic, s_nls, s_third = criteria.quadratic_values(*corr)

    inside = lam_g + eta_g <= 1 + 1e-12
    flags = np.zeros(lam_g.shape, dtype=int)
    flags[inside] |= FLAG_IN_POLYTOPE
    flags[inside & (b_max <= criteria.LOCAL_BOUND + tol)] |= FLAG_LOCAL
    flags[inside & (tlm_a <= tlm_rhs + tol)] |= FLAG_TLM
    flags[inside & (s_ic <= criteria.QUADRATIC_BOUND + tol)] |= FLAG_IC
    flags[inside & (s_nls <= criteria.QUADRATIC_BOUND + tol)] |= FLAG_NLS
    flags[inside & (s_third <= criteria.QUADRATIC_BOUND + tol)] |= FLAG_THIRD

    values = dict(c)
    values.update(
        b_max=b_max, tlm_a=tlm_a, tlm_rhs=tlm_rhs,
        s_ic=s_ic, s_nls=s_nls, s_third=s_third,
    )
    return SliceGrid(family=family, lambdas=lambdas, etas=etas,
                     flags=flags, values=values)


# ---------------------------------------------------------------------------
# boundaries along rays
# ---------------------------------------------------------------------------

CRITERION_NAMES = ("local", "tlm", "ic", "nls", "third", "ns")

MarginFn = Callable[[float, float], float]


def _criterion_margin(family: MixtureFamily, criterion: str) -> MarginFn:
    """Margin function: positive exactly where the criterion is violated."""

    def margin(lam: float, eta: float) -> float:
        if criterion == "ns":
            return lam + eta - 1.0
        c = family.correlators(lam, eta).as_tuple()
        if criterion == "local":
            return float(criteria.chsh_values(*c)[4]) - criteria.LOCAL_BOUND
        if criterion == "tlm":
            a, rhs = criteria.tlm_values(*c)
            return float(a - rhs)
        s_ic, s_nls, s_third = criteria.quadratic_values(*c)
        if criterion == "ic":
            return float(s_ic) - criteria.QUADRATIC_BOUND
        if criterion == "nls":
            return float(s_nls) - criteria.QUADRATIC_BOUND
        if criterion == "third":
            return float(s_third) - criteria.QUADRATIC_BOUND
        raise ValueError(f"unknown criterion {criterion!r}")

    return margin


def boundary_along_ray(
    family: MixtureFamily,
    theta: float,
    criterion: str | MarginFn,
    tol: float = 1e-8,
    presamples: int = 33,
) -> float:
    """Radius where a criterion starts failing along (lambda, eta) = r (cos, sin).

    The ray is capped at the polytope face lambda + eta = 1.  If the
    criterion holds on the whole segment the cap radius is returned; a
    verdict that flips more than once raises NonMonotoneAlongRay.
    """
    if not 0 <= theta <= math.pi / 2 + 1e-12:
        raise ValueError("theta must lie in [0, pi/2]")
    margin = _criterion_margin(family, criterion) if isinstance(criterion, str) else criterion
    ct, st = math.cos(theta), math.sin(theta)
    r_max = 1.0 / (ct + st)

    radii = np.linspace(0.0, r_max, presamples)
    violated = [margin(r * ct, r * st) > 0 for r in radii]
    if any(a and not b for a, b in zip(violated, violated[1:])):
        raise NonMonotoneAlongRay(
            f"criterion verdict is not single-crossing along theta={theta}"
        )
    if not any(violated):
        return r_max
    first_bad = violated.index(True)
    if first_bad == 0:
        return 0.0
    lo = radii[first_bad - 1]
    hi = radii[first_bad]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin(mid * ct, mid * st) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundaryCurve:
    """Transition radii of every criterion along one ray."""

    theta: float
    r_local: float
    r_tlm: float
    r_ic: float
    r_nls: float
    r_third: float
    r_ns: float
    tol: float

    @property
    def merge_gap(self) -> float:
        return abs(self.r_ic - self.r_tlm)


BOUNDARY_COLUMNS = ("theta", "r_local", "r_tlm", "r_ic", "r_nls", "r_ns", "merge_gap")


def boundary_curves(
    family: MixtureFamily, n_rays: int = 100, tol: float = 1e-8
) -> list[BoundaryCurve]:
    """Boundary radii for all criteria on an even fan of rays."""
    curves = []
    for theta in np.linspace(0.0, math.pi / 2, n_rays):
        radii = {
            crit: boundary_along_ray(family, float(theta), crit, tol)
            for crit in CRITERION_NAMES
        }
        curves.append(
            BoundaryCurve(
                theta=float(theta),
                r_local=radii["local"],
                r_tlm=radii["tlm"],
                r_ic=radii["ic"],
                r_nls=radii["nls"],
                r_third=radii["third"],
                r_ns=radii["ns"],
                tol=tol,
            )
        )
    return curves


def boundary_to_csv(curves: Sequence[BoundaryCurve], stream: TextIO) -> None:
    stream.write(",".join(BOUNDARY_COLUMNS) + "\n")
    for b in curves:
        row = (b.theta, b.r_local, b.r_tlm, b.r_ic, b.r_nls, b.r_ns, b.merge_gap)
        stream.write(",".join(fmt12(v) for v in row) + "\n")


@dataclass(frozen=True)
class MergeReport:
    """Quantumness vs information-causality boundary radii, ray by ray."""

    family: MixtureFamily
    thetas: np.ndarray
    r_tlm: np.ndarray
    r_ic: np.ndarray

    @property
    def gaps(self) -> np.ndarray:
        return np.abs(self.r_ic - self.r_tlm)

    @property
    def max_discrepancy(self) -> float:
        return float(self.gaps.max())

    def to_dict(self) -> dict:
        return {
            "family": self.family.name,
            "rays": len(self.thetas),
            "max_discrepancy": self.max_discrepancy,
            "per_ray": [
                {
                    "theta": float(t),
                    "r_tlm": float(q),
                    "r_ic": float(i),
                    "gap": float(abs(i - q)),
                }
                for t, q, i in zip(self.thetas, self.r_tlm, self.r_ic)
            ],
        }


def merge_report(
    family: MixtureFamily, n_rays: int = 100, tol: float = 1e-8
) -> MergeReport:
    """Compare the quantumness and information-causality radii on each ray."""
    thetas = np.linspace(0.0, math.pi / 2, n_rays)
    r_tlm = np.array(
        [boundary_along_ray(family, float(t), "tlm", tol) for t in thetas]
    )
    r_ic = np.array(
        [boundary_along_ray(family, float(t), "ic", tol) for t in thetas]
    )
    return MergeReport(family=family, thetas=thetas, r_tlm=r_tlm, r_ic=r_ic)


# ---------------------------------------------------------------------------
# SVG region map
# ---------------------------------------------------------------------------

_REGION_COLORS = {
    1: "#d9d9d9",  # local
    2: "#74add1",  # non-local but quantum-admissible
    3: "#fdae61",  # passes the IC quadratic only
    4: "#d73027",  # beyond information causality
}

_REGION_LABELS = {
    1: "local",
    2: "quantum (Landau)",
    3: "IC quadratic only",
    4: "beyond IC",
}


def grid_to_svg(grid: SliceGrid, size: int = 640) -> str:
    """Static colored region map of a classified slice (lambda right, eta up)."""
    margin = 60
    plot = size - 2 * margin
    n = grid.resolution
    cell = plot / n
    codes = grid.region_codes()

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<text x="{margin}" y="{margin - 32}" font-family="monospace" font-size="14">'
        f"slice {grid.family.name}</text>",
    ]
    # legend swatches
    lx = margin
    for code in (1, 2, 3, 4):
        parts.append(
            f'<rect x="{lx}" y="{margin - 24}" width="12" height="12" '
            f'fill="{_REGION_COLORS[code]}"/>'
        )
        parts.append(
            f'<text x="{lx + 16}" y="{margin - 14}" font-family="monospace" '
            f'font-size="11">{_REGION_LABELS[code]}</text>'
        )
        lx += 16 + 9 * len(_REGION_LABELS[code]) + 12

    # cells, run-length merged along the eta axis
    for i in range(n):
        j = 0
        while j < n:
            code = codes[i, j]
            k = j
            while k < n and codes[i, k] == code:
                k += 1
            if code != 0:
                x0 = margin + i * cell
                y0 = margin + plot - k * cell
                parts.append(
                    f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{cell + 0.1:.2f}" '
                    f'height="{(k - j) * cell + 0.1:.2f}" fill="{_REGION_COLORS[code]}"/>'
                )
            j = k
    # frame and axis labels
    parts.append(
        f'<rect x="{margin}" y="{margin}" width="{plot}" height="{plot}" '
        f'fill="none" stroke="black"/>'
    )
    parts.append(
        f'<text x="{margin + plot / 2:.0f}" y="{size - 18}" font-family="monospace" '
        f'font-size="13" text-anchor="middle">lambda</text>'
    )
    parts.append(
        f'<text x="18" y="{margin + plot / 2:.0f}" font-family="monospace" '
        f'font-size="13" text-anchor="middle" transform="rotate(-90 18 '
        f'{margin + plot / 2:.0f})">eta</text>'
    )
    for t in (0.0, 0.5, 1.0):
        parts.append(
            f'<text x="{margin + t * plot:.0f}" y="{margin + plot + 16}" '
            f'font-family="monospace" font-size="11" text-anchor="middle">{t:g}</text>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{margin + plot - t * plot + 4:.0f}" '
            f'font-family="monospace" font-size="11" text-anchor="end">{t:g}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

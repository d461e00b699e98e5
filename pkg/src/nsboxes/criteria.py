"""Correlator-level criteria for two-input/two-output boxes.

Implements the CHSH stack (local bound 2, Tsirelson bound 2*sqrt(2),
non-signalling cap 4), the Landau quantumness condition with unbiased
marginals, the three quadratic bounds

    (C00+C10)^2 + (C01-C11)^2 <= 4     (information causality / Uffink)
    (C00+C01)^2 + (C10-C11)^2 <= 4     (non-locality-swapping uselessness)
    (C10+C01)^2 + (C00-C11)^2 <= 4     (conjectural; no principle known)

the planar geometry identity relating the first quadratic to the Landau
area term, the AM-GM gap that proves the Landau condition dominates the
quadratic one, and the boundary-merge condition C00 = C10, C01 = -C11.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boxes import (
    CorrelatorVector,
    JointBox,
    Marginals,
    SignallingBox,
    correlators_of,
    marginals_of,
    validate,
)

#: additive slack on criterion bounds when turning values into verdicts
VERDICT_TOL = 1e-9

LOCAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
NOSIGNALLING_BOUND = 4.0
QUADRATIC_BOUND = 4.0


class OutOfRangeCorrelator(ValueError):
    """A correlator lies outside [-1, 1]."""


class SignConventionViolated(ValueError):
    """Input does not satisfy c00, c10, c01 >= 0 and c11 <= 0."""


def _check_range(c: CorrelatorVector) -> None:
    for name, v in zip(("c00", "c01", "c10", "c11"), c.as_tuple()):
        if abs(v) > 1.0 + VERDICT_TOL:
            raise OutOfRangeCorrelator(f"{name} = {v} outside [-1, 1]")


# ---------------------------------------------------------------------------
# kernels: plain arithmetic, usable on scalars or numpy arrays alike
# ---------------------------------------------------------------------------

def chsh_values(c00, c01, c10, c11):
    """(B00, B01, B10, B11, Bmax) with B_xy = |sum C - 2 C_xy|."""
    s = c00 + c01 + c10 + c11
    b00 = np.abs(s - 2 * c00)
    b01 = np.abs(s - 2 * c01)
    b10 = np.abs(s - 2 * c10)
    b11 = np.abs(s - 2 * c11)
    bmax = np.maximum(np.maximum(b00, b01), np.maximum(b10, b11))
    return b00, b01, b10, b11, bmax


def tlm_values(c00, c01, c10, c11):
    """(A, rhs): A = |C00 C10 - C01 C11|, rhs the Landau square-root sum."""
    a = np.abs(c00 * c10 - c01 * c11)
    # radicands clipped at 0: |C| may exceed 1 by a rounding ulp
    r0 = np.clip(1.0 - c00 * c00, 0.0, None) * np.clip(1.0 - c10 * c10, 0.0, None)
    r1 = np.clip(1.0 - c01 * c01, 0.0, None) * np.clip(1.0 - c11 * c11, 0.0, None)
    return a, np.sqrt(r0) + np.sqrt(r1)


def quadratic_values(c00, c01, c10, c11):
    """(s_ic, s_nls, s_third), the three quadratic forms."""
    s_ic = (c00 + c10) ** 2 + (c01 - c11) ** 2
    s_nls = (c00 + c01) ** 2 + (c10 - c11) ** 2
    s_third = (c10 + c01) ** 2 + (c00 - c11) ** 2
    return s_ic, s_nls, s_third


def omega_gap_values(c00, c01, c10, c11):
    """(w00, w01, w10, w11, gap) with w_xy = 1 - C_xy^2.

    gap = sum(w) - 2*sqrt(w00*w10) - 2*sqrt(w01*w11), the AM-GM slack;
    algebraically gap = 4 - (sum C^2 + 2*tlm_rhs) and is never negative.
    """
    w00 = np.clip(1.0 - c00 * c00, 0.0, None)
    w01 = np.clip(1.0 - c01 * c01, 0.0, None)
    w10 = np.clip(1.0 - c10 * c10, 0.0, None)
    w11 = np.clip(1.0 - c11 * c11, 0.0, None)
    gap = w00 + w10 + w01 + w11 - 2 * np.sqrt(w00 * w10) - 2 * np.sqrt(w01 * w11)
    return w00, w01, w10, w11, gap


def merge_residual(c00, c01, c10, c11):
    """max(|C00 - C10|, |C01 + C11|); zero exactly on the merge locus."""
    return np.maximum(np.abs(c00 - c10), np.abs(c01 + c11))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChshReport:
    b00: float
    b01: float
    b10: float
    b11: float
    b_max: float
    local_ok: bool
    tsirelson_ok: bool
    nosignalling_max_ok: bool

    def to_dict(self) -> dict:
        return {
            "b00": self.b00,
            "b01": self.b01,
            "b10": self.b10,
            "b11": self.b11,
            "b_max": self.b_max,
            "local_ok": self.local_ok,
            "tsirelson_ok": self.tsirelson_ok,
            "nosignalling_max_ok": self.nosignalling_max_ok,
        }


@dataclass(frozen=True)
class TlmReport:
    """Landau quantumness check (form valid for unbiased marginals).

    `unbiased` is None when only correlators were supplied; it is a caveat
    flag, not part of the inequality itself.
    """

    a_value: float
    rhs: float
    satisfied: bool
    unbiased: bool | None = None

    def to_dict(self) -> dict:
        return {
            "tlm_a": self.a_value,
            "tlm_rhs": self.rhs,
            "tlm_ok": self.satisfied,
            "unbiased": self.unbiased,
        }


@dataclass(frozen=True)
class QuadraticReport:
    """The three quadratic bounds; s_third has no known principle behind it."""

    s_ic: float
    s_nls: float
    s_third: float
    ic_ok: bool
    nls_ok: bool
    third_ok: bool

    def to_dict(self) -> dict:
        return {
            "s_ic": self.s_ic,
            "s_nls": self.s_nls,
            "s_third": self.s_third,
            "ic_ok": self.ic_ok,
            "nls_ok": self.nls_ok,
            "third_ok": self.third_ok,
        }


@dataclass(frozen=True)
class GeometryReport:
    """Planar picture of the first quadratic form.

    r1 = (C00, C01), r2 = (-C10, C11), r3 = (C11, C10); r2 and r3 are
    perpendicular and equally long.  s_from_vectors = |r1 - r2|^2 equals
    sum_c_squared + 2 * a_area where a_area is the parallelogram spanned
    by r1 and r3 (the Landau A term under the sign convention).
    """

    r1: tuple[float, float]
    r2: tuple[float, float]
    r3: tuple[float, float]
    phi: float
    s_from_vectors: float
    a_area: float
    sum_c_squared: float

    def to_dict(self) -> dict:
        return {
            "r1": list(self.r1),
            "r2": list(self.r2),
            "r3": list(self.r3),
            "phi": self.phi,
            "s_from_vectors": self.s_from_vectors,
            "a_area": self.a_area,
            "sum_c_squared": self.sum_c_squared,
        }


@dataclass(frozen=True)
class GapReport:
    omega00: float
    omega01: float
    omega10: float
    omega11: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "omega00": self.omega00,
            "omega01": self.omega01,
            "omega10": self.omega10,
            "omega11": self.omega11,
            "gap": self.gap,
        }


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def chsh(c: CorrelatorVector, tol: float = VERDICT_TOL) -> ChshReport:
    """CHSH stack: all four B_xy plus verdicts against 2, 2*sqrt(2) and 4."""
    _check_range(c)
    b00, b01, b10, b11, bmax = chsh_values(*c.as_tuple())
    return ChshReport(
        b00=float(b00),
        b01=float(b01),
        b10=float(b10),
        b11=float(b11),
        b_max=float(bmax),
        local_ok=bool(bmax <= LOCAL_BOUND + tol),
        tsirelson_ok=bool(bmax <= TSIRELSON_BOUND + tol),
        nosignalling_max_ok=bool(bmax <= NOSIGNALLING_BOUND + tol),
    )


def tlm(
    c: CorrelatorVector, unbiased: bool | None = None, tol: float = VERDICT_TOL
) -> TlmReport:
    """Landau criterion |C00 C10 - C01 C11| <= sum_j sqrt((1-C0j^2)(1-C1j^2))."""
    _check_range(c)
    a, rhs = tlm_values(*c.as_tuple())
    return TlmReport(
        a_value=float(a),
        rhs=float(rhs),
        satisfied=bool(a <= rhs + tol),
        unbiased=unbiased,
    )


def quadratics(c: CorrelatorVector, tol: float = VERDICT_TOL) -> QuadraticReport:
    """All three quadratic forms with verdicts against the bound 4."""
    _check_range(c)
    s_ic, s_nls, s_third = quadratic_values(*c.as_tuple())
    bound = QUADRATIC_BOUND + tol
    return QuadraticReport(
        s_ic=float(s_ic),
        s_nls=float(s_nls),
        s_third=float(s_third),
        ic_ok=bool(s_ic <= bound),
        nls_ok=bool(s_nls <= bound),
        third_ok=bool(s_third <= bound),
    )


def geometry(c: CorrelatorVector) -> GeometryReport:
    """Vector picture of the first quadratic form.

    Requires the sign pattern c00, c10, c01 >= 0 and c11 <= 0 (canonicalize
    first); only then does the cross term equal the area |r1 x r3|.
    """
    _check_range(c)
    if not (c.c00 >= 0 and c.c10 >= 0 and c.c01 >= 0 and c.c11 <= 0):
        raise SignConventionViolated(
            f"need c00, c10, c01 >= 0 and c11 <= 0, got {c.as_tuple()}"
        )
    r1 = (c.c00, c.c01)
    r2 = (-c.c10, c.c11)
    r3 = (c.c11, c.c10)
    # |r1 - r2|^2 is (C00+C10)^2 + (C01-C11)^2; evaluated through the shared
    # kernel so the two routes agree bit for bit
    s_from_vectors = float(quadratic_values(*c.as_tuple())[0])
    a_area = abs(r1[0] * r3[1] - r1[1] * r3[0])
    sum_sq = c.c00**2 + c.c01**2 + c.c10**2 + c.c11**2
    if abs(s_from_vectors - (sum_sq + 2.0 * a_area)) > 1e-12:
        raise ArithmeticError(
            "square-area identity violated; input is outside the sign convention"
        )
    n1 = math.hypot(*r1)
    n3 = math.hypot(*r3)
    if n1 == 0.0 or n3 == 0.0:
        phi = 0.0
    else:
        phi = math.acos(
            min(1.0, max(-1.0, (r1[0] * r3[0] + r1[1] * r3[1]) / (n1 * n3)))
        )
    return GeometryReport(
        r1=r1,
        r2=r2,
        r3=r3,
        phi=phi,
        s_from_vectors=s_from_vectors,
        a_area=a_area,
        sum_c_squared=sum_sq,
    )


def amgm_gap(c: CorrelatorVector) -> GapReport:
    """AM-GM slack separating the Landau bound from the quadratic bound."""
    w00, w01, w10, w11, gap = omega_gap_values(*c.as_tuple())
    return GapReport(
        omega00=float(w00),
        omega01=float(w01),
        omega10=float(w10),
        omega11=float(w11),
        gap=float(gap),
    )


def merge_condition(c: CorrelatorVector, tol: float = VERDICT_TOL) -> bool:
    """True iff C00 = C10 and C01 = -C11 within tol (r1 + r2 = 0)."""
    return bool(merge_residual(*c.as_tuple()) <= tol)


@dataclass(frozen=True)
class CriteriaReport:
    """Every criterion evaluated on one box."""

    correlators: CorrelatorVector
    chsh: ChshReport
    tlm: TlmReport
    quadratics: QuadraticReport
    gap: GapReport
    merge: bool
    unbiased: bool

    def to_dict(self) -> dict:
        c = self.correlators
        return {
            "c00": c.c00,
            "c01": c.c01,
            "c10": c.c10,
            "c11": c.c11,
            "b_max": self.chsh.b_max,
            "local_ok": self.chsh.local_ok,
            "tsirelson_ok": self.chsh.tsirelson_ok,
            "nosignalling_max_ok": self.chsh.nosignalling_max_ok,
            "tlm_a": self.tlm.a_value,
            "tlm_rhs": self.tlm.rhs,
            "tlm_ok": self.tlm.satisfied,
            "s_ic": self.quadratics.s_ic,
            "s_nls": self.quadratics.s_nls,
            "s_third": self.quadratics.s_third,
            "ic_ok": self.quadratics.ic_ok,
            "nls_ok": self.quadratics.nls_ok,
            "third_ok": self.quadratics.third_ok,
            "gap": self.gap.gap,
            "merge": self.merge,
            "unbiased": self.unbiased,
        }


#: CSV column order matching CriteriaReport.to_dict value fields
CRITERIA_COLUMNS = (
    "c00", "c01", "c10", "c11",
    "b_max", "tlm_a", "tlm_rhs", "s_ic", "s_nls", "s_third",
    "gap", "merge", "unbiased",
)


def full_report(box: JointBox, tol: float = VERDICT_TOL) -> CriteriaReport:
    """Evaluate every criterion on a validated box."""
    report = validate(box)
    if not report.nonsignalling:
        raise SignallingBox(
            f"box is signalling (residual {report.signalling_residual:.3g})"
        )
    if not report.ok:
        raise ValueError(
            "box table is not a probability table "
            f"(normalization residual {report.normalization_residual:.3g}, "
            f"positivity residual {report.positivity_residual:.3g})"
        )
    margs: Marginals = marginals_of(box)
    c = correlators_of(box)
    return CriteriaReport(
        correlators=c,
        chsh=chsh(c, tol),
        tlm=tlm(c, unbiased=margs.unbiased, tol=tol),
        quadratics=quadratics(c, tol),
        gap=amgm_gap(c),
        merge=merge_condition(c, tol),
        unbiased=margs.unbiased,
    )

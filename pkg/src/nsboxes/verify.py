"""Randomized self-check suites behind the `verify` command.

Each suite draws from a seeded generator, checks one advertised invariant
on many samples, and reports how many samples were checked and how many
failed.  Suites are pure given the seed, so reruns are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import criteria, slices, symmetry
from .boxes import (
    CorrelatorVector,
    LocalLabel,
    NonlocalLabel,
    correlators_of,
    enumerate_vertices,
    isotropic_box,
    make_local,
    make_nonlocal,
    maximally_mixed,
    mix,
    validate,
    vertex_box,
    vertex_names,
)
from .game import (
    BiasPair,
    GameConfig,
    exact_total_information,
    ic_threshold_scan,
    monte_carlo_game,
)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: int = 0
    details: list[str] = field(default_factory=list)

    def check(self, ok: bool, detail: str = "") -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if detail and len(self.details) < 10:
                self.details.append(detail)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _random_correlators(rng: np.random.Generator) -> CorrelatorVector:
    return CorrelatorVector(*(rng.uniform(-1, 1) for _ in range(4)))


def _random_unbiased_box(rng: np.random.Generator):
    """Random mixture of the 8 extreme non-local vertices plus noise."""
    weights = rng.random(9)
    weights /= weights.sum()
    terms = [(weights[-1], maximally_mixed())]
    idx = 0
    for m in (0, 1):
        for n in (0, 1):
            for s in (0, 1):
                terms.append((weights[idx], make_nonlocal(NonlocalLabel(m, n, s))))
                idx += 1
    return mix(terms)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_vertex_census(rng, samples=None) -> SuiteResult:
    """CHSH and quadratic values at all 24 vertices, plus structure checks."""
    res = SuiteResult("vertex-census")
    for name, box in enumerate_vertices():
        rep = criteria.full_report(box)
        c = rep.correlators
        if name.startswith("NL"):
            label = NonlocalLabel.parse(name)
            res.check(rep.chsh.b_max == 4.0, f"{name}: b_max {rep.chsh.b_max}")
            expected = {
                (x, y): (-1.0)
                ** ((x & y) ^ (label.mu & x) ^ (label.nu & y) ^ label.sigma)
                for x in range(2)
                for y in range(2)
            }
            m = c.as_matrix()
            res.check(
                all(m[x, y] == expected[(x, y)] for x in range(2) for y in range(2)),
                f"{name}: correlators {c.as_tuple()}",
            )
            negatives = sum(1 for v in c.as_tuple() if v == -1.0)
            res.check(negatives % 2 == 1, f"{name}: {negatives} negative entries")
            quads = (rep.quadratics.s_ic, rep.quadratics.s_nls, rep.quadratics.s_third)
            res.check(
                all(q in (0.0, 8.0) for q in quads) and 8.0 in quads,
                f"{name}: quadratics {quads}",
            )
            # the mu=nu=0 pair tops out all three forms; the rest exactly one
            expected_eights = 3 if (label.mu, label.nu) == (0, 0) else 1
            res.check(
                quads.count(8.0) == expected_eights, f"{name}: quadratics {quads}"
            )
        else:
            label = LocalLabel.parse(name)
            bvals = (rep.chsh.b00, rep.chsh.b01, rep.chsh.b10, rep.chsh.b11)
            res.check(all(b == 2.0 for b in bvals), f"{name}: B values {bvals}")
            a_of = [(-1.0) ** ((label.mu & x) ^ label.nu) for x in range(2)]
            b_of = [(-1.0) ** ((label.sigma & y) ^ label.tau) for y in range(2)]
            m = c.as_matrix()
            res.check(
                all(
                    m[x, y] == a_of[x] * b_of[y] for x in range(2) for y in range(2)
                ),
                f"{name}: correlators do not factorize",
            )
            quads = (rep.quadratics.s_ic, rep.quadratics.s_nls, rep.quadratics.s_third)
            res.check(quads == (4.0, 4.0, 4.0), f"{name}: quadratics {quads}")
        res.check(validate(box).ok, f"{name}: invalid table")
    return res


def suite_affine(rng, samples=None) -> SuiteResult:
    """Correlators are affine in mixture weights."""
    res = SuiteResult("affine")
    names = vertex_names()
    for _ in range(samples or 200):
        p = vertex_box(names[rng.integers(0, len(names))])
        q = vertex_box(names[rng.integers(0, len(names))])
        w = rng.random()
        mixed = mix([(w, p), (1 - w, q)])
        lhs = np.array(correlators_of(mixed).as_tuple())
        rhs = w * np.array(correlators_of(p).as_tuple()) + (1 - w) * np.array(
            correlators_of(q).as_tuple()
        )
        res.check(np.max(np.abs(lhs - rhs)) <= 1e-12)
    return res


def suite_symmetry(rng, samples=None) -> SuiteResult:
    """Group structure and covariance of the relabeling action."""
    res = SuiteResult("symmetry")
    elements = symmetry.all_elements()
    perms = {symmetry._cell_perm(g) for g in elements}
    res.check(len(perms) == 128, f"only {len(perms)} distinct actions")
    for _ in range(samples or 100):
        box = _random_unbiased_box(rng)
        g = elements[rng.integers(0, len(elements))]
        h = elements[rng.integers(0, len(elements))]
        gh = symmetry.compose(g, h)
        seq = symmetry.apply_symmetry(symmetry.apply_symmetry(box, g), h)
        res.check(
            np.max(np.abs(symmetry.apply_symmetry(box, gh).p - seq.p)) == 0.0,
            "composition mismatch",
        )
        ginv = symmetry.inverse(g)
        back = symmetry.apply_symmetry(symmetry.apply_symmetry(box, g), ginv)
        res.check(np.max(np.abs(back.p - box.p)) == 0.0, "inverse mismatch")
        via_box = correlators_of(symmetry.apply_symmetry(box, g))
        via_action = symmetry.correlator_action(g, correlators_of(box))
        res.check(
            max(
                abs(a - b)
                for a, b in zip(via_box.as_tuple(), via_action.as_tuple())
            )
            <= 1e-12,
            "correlator action mismatch",
        )
        res.check(validate(symmetry.apply_symmetry(box, g)).ok, "invalid image")
    return res


def suite_amgm(rng, samples=None) -> SuiteResult:
    """The AM-GM gap is non-negative for every correlator vector."""
    res = SuiteResult("amgm")
    n = samples or 100000
    c = rng.uniform(-1, 1, size=(n, 4))
    _, _, _, _, gap = criteria.omega_gap_values(c[:, 0], c[:, 1], c[:, 2], c[:, 3])
    bad = int(np.sum(gap < -1e-12))
    res.checked = n
    res.failures = bad
    if bad:
        res.details.append(f"min gap {gap.min()}")
    return res


def suite_dominance(rng, samples=None) -> SuiteResult:
    """Landau-satisfied vectors never violate the IC quadratic."""
    res = SuiteResult("dominance")
    n = samples or 100000
    c = rng.uniform(-1, 1, size=(n, 4))
    a, rhs = criteria.tlm_values(c[:, 0], c[:, 1], c[:, 2], c[:, 3])
    s_ic, _, _ = criteria.quadratic_values(c[:, 0], c[:, 1], c[:, 2], c[:, 3])
    ok_tlm = a <= rhs + criteria.VERDICT_TOL
    bad = int(np.sum(ok_tlm & (s_ic > 4 + 1e-9)))
    res.checked = n
    res.failures = bad
    if bad:
        res.details.append(f"{bad} Landau points violate the quadratic")
    return res


def suite_geometry(rng, samples=None) -> SuiteResult:
    """Square-area identity under the canonical sign pattern."""
    res = SuiteResult("geometry")
    for _ in range(samples or 10000):
        c = CorrelatorVector(
            rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(-1, 0)
        )
        g = criteria.geometry(c)
        res.check(
            abs(g.s_from_vectors - (g.sum_c_squared + 2 * g.a_area)) <= 1e-12,
            f"identity off at {c.as_tuple()}",
        )
        s_ic, _, _ = criteria.quadratic_values(*c.as_tuple())
        res.check(g.s_from_vectors == s_ic, "vector square differs from quadratic")
    return res


def suite_permutation(rng, samples=None) -> SuiteResult:
    """Swapping the two cross correlators exchanges the first two quadratics."""
    res = SuiteResult("permutation")
    for _ in range(samples or 10000):
        c = _random_correlators(rng)
        swapped = CorrelatorVector(c.c00, c.c10, c.c01, c.c11)
        s_ic, s_nls, s_third = criteria.quadratic_values(*c.as_tuple())
        s_ic_sw, s_nls_sw, s_third_sw = criteria.quadratic_values(*swapped.as_tuple())
        res.check(abs(s_nls - s_ic_sw) <= 1e-12)
        res.check(abs(s_ic - s_nls_sw) <= 1e-12)
        res.check(abs(s_third - s_third_sw) <= 1e-12)
    return res


def suite_equality_clause(rng, samples=None) -> SuiteResult:
    """Zero AM-GM gap exactly characterizes pairwise-equal omegas."""
    res = SuiteResult("equality-clause")
    for _ in range(samples or 5000):
        c = _random_correlators(rng)
        rep = criteria.amgm_gap(c)
        paired = (
            abs(rep.omega00 - rep.omega10) <= 2.1e-6
            and abs(rep.omega01 - rep.omega11) <= 2.1e-6
        )
        if rep.gap <= 1e-12:
            res.check(paired, f"tiny gap without omega pairing at {c.as_tuple()}")
        else:
            res.check(True)
        # constructed merge points sit on the zero-gap locus
        signs = rng.choice([-1.0, 1.0], size=2)
        merged = CorrelatorVector(c.c00, c.c01, signs[0] * c.c00, signs[1] * c.c01)
        res.check(
            abs(criteria.amgm_gap(merged).gap) <= 1e-12,
            "constructed pair gap beyond tolerance",
        )
    return res


def suite_local_soundness(rng, samples=None) -> SuiteResult:
    """Random mixtures of the 16 deterministic vertices respect the CHSH bound."""
    res = SuiteResult("local-soundness")
    locals_ = [
        make_local(LocalLabel(m, n, s, t))
        for m in (0, 1)
        for n in (0, 1)
        for s in (0, 1)
        for t in (0, 1)
    ]
    for _ in range(samples or 10000):
        w = rng.random(16)
        w /= w.sum()
        box = mix(list(zip(w, locals_)))
        rep = criteria.chsh(correlators_of(box))
        res.check(rep.b_max <= 2 + 1e-9, f"B = {rep.b_max}")
    return res


def suite_closed_form(rng, samples=None) -> SuiteResult:
    """Slice closed forms agree with constructive mixing."""
    res = SuiteResult("closed-form")
    for _ in range(samples or 1000):
        base = NonlocalLabel(*rng.integers(0, 2, size=3))
        if rng.random() < 0.5:
            second = NonlocalLabel(*rng.integers(0, 2, size=3))
        else:
            second = LocalLabel(*rng.integers(0, 2, size=4))
        lam = float(rng.uniform(0, 1))
        eta = float(rng.uniform(0, 1 - lam))
        family = slices.MixtureFamily(base, second)
        closed = np.array(family.correlators(lam, eta).as_tuple())
        constructed = np.array(correlators_of(family.box(lam, eta)).as_tuple())
        res.check(
            np.max(np.abs(closed - constructed)) <= 1e-12,
            f"{family.name} at ({lam:.3f}, {eta:.3f})",
        )
    return res


def suite_ray_dominance(rng, samples=None) -> SuiteResult:
    """Quantumness boundary sits inside the IC boundary on every ray."""
    res = SuiteResult("ray-dominance")
    for _ in range(samples or 60):
        base = NonlocalLabel(*rng.integers(0, 2, size=3))
        if rng.random() < 0.5:
            second = NonlocalLabel(*rng.integers(0, 2, size=3))
        else:
            second = LocalLabel(*rng.integers(0, 2, size=4))
        family = slices.MixtureFamily(base, second)
        theta = float(rng.uniform(0, math.pi / 2))
        try:
            r_tlm = slices.boundary_along_ray(family, theta, "tlm")
            r_ic = slices.boundary_along_ray(family, theta, "ic")
        except slices.NonMonotoneAlongRay:
            continue
        res.check(r_tlm <= r_ic + 1e-6, f"{family.name} theta={theta:.3f}")
    return res


def suite_merge_case_a(rng, samples=None) -> SuiteResult:
    """The mu = mu' = 0 two-vertex family merges the two boundaries."""
    res = SuiteResult("merge-case-a")
    family = slices.MixtureFamily.parse("NL000+NL010")
    report = slices.merge_report(family, n_rays=samples or 100, tol=1e-8)
    res.check(
        report.max_discrepancy <= 1e-6,
        f"max discrepancy {report.max_discrepancy}",
    )
    grid = slices.sweep(family, resolution=101)
    inside = grid.in_polytope()
    merged = criteria.merge_residual(
        grid.values["c00"], grid.values["c01"], grid.values["c10"], grid.values["c11"]
    )
    res.check(bool(np.all(merged[inside] <= 1e-9)), "merge condition fails on grid")
    res.checked += int(inside.sum())
    return res


def suite_no_merge_case_b(rng, samples=None) -> SuiteResult:
    """A local second vertex keeps the boundaries apart."""
    res = SuiteResult("no-merge-case-b")
    family = slices.MixtureFamily.parse("NL000+L0000")
    grid = slices.sweep(family, resolution=201)
    inside = grid.in_polytope()
    ic_ok = (grid.flags & slices.FLAG_IC) != 0
    tlm_ok = (grid.flags & slices.FLAG_TLM) != 0
    witnesses = inside & ic_ok & ~tlm_ok
    res.check(bool(witnesses.any()), "no cell separates the two boundaries")
    res.details.append(f"{int(witnesses.sum())} witness cells")
    eta_grid = np.broadcast_to(grid.etas, grid.flags.shape)
    merged = criteria.merge_residual(
        grid.values["c00"], grid.values["c01"], grid.values["c10"], grid.values["c11"]
    )
    relevant = inside & (eta_grid > 1e-9)
    res.check(
        bool(np.all(merged[relevant] > 1e-9)),
        "merge condition unexpectedly holds with a local admixture",
    )
    res.checked += int(inside.sum())
    return res


def _brute_force_depth2(box, k0: int) -> float:
    """Exact success probability for index k0 at depth 2 by full enumeration."""
    p = box.p
    e = BiasPair.from_box(box)
    sign_i = -1 if e.e_i < 0 else 1
    sign_ii = -1 if e.e_ii < 0 else 1
    w = bin(k0).count("1")
    flip = (sign_i ** (2 - w)) * (sign_ii**w) < 0
    y_leaf = k0 & 1
    y_top = (k0 >> 1) & 1
    j_path = k0 >> 1

    prob_correct = 0.0
    for bits in range(16):
        d = [(bits >> i) & 1 for i in range(4)]
        x_leaf = [d[0] ^ d[1], d[2] ^ d[3]]
        for a0 in range(2):
            for b0 in range(2):
                for a1 in range(2):
                    for b1 in range(2):
                        leaf_a = (a0, a1)
                        leaf_b = (b0, b1)
                        w_leaf = (
                            p[a0, b0, x_leaf[0], y_leaf if j_path == 0 else 0]
                            * p[a1, b1, x_leaf[1], y_leaf if j_path == 1 else 0]
                        )
                        if w_leaf == 0.0:
                            continue
                        m = [d[0] ^ leaf_a[0], d[2] ^ leaf_a[1]]
                        x_top = m[0] ^ m[1]
                        for a2 in range(2):
                            for b2 in range(2):
                                w_all = w_leaf * p[a2, b2, x_top, y_top]
                                if w_all == 0.0:
                                    continue
                                c = m[0] ^ a2
                                guess = c ^ b2 ^ leaf_b[j_path]
                                if flip:
                                    guess ^= 1
                                if guess == d[k0]:
                                    prob_correct += w_all / 16.0
    return prob_correct


def suite_game_composition(rng, samples=None) -> SuiteResult:
    """Path bias equals the product of level biases (depth-2 enumeration)."""
    res = SuiteResult("game-composition")
    boxes = [_random_unbiased_box(rng) for _ in range(samples or 12)]
    boxes.append(isotropic_box(-0.6))  # negative-bias decoder path
    boxes.append(isotropic_box(2**-0.5))
    for box in boxes:
        pair = BiasPair.from_box(box)
        for k0 in range(4):
            w = bin(k0).count("1")
            bias = (pair.e_i ** (2 - w)) * (pair.e_ii**w)
            expected = (1 + abs(bias)) / 2
            actual = _brute_force_depth2(box, k0)
            res.check(
                abs(actual - expected) <= 1e-12,
                f"k={k0}: brute {actual} vs closed {expected}",
            )
    return res


def suite_game_oracle(rng, samples=None) -> SuiteResult:
    """Monte Carlo per-index statistics agree with the exact arithmetic."""
    res = SuiteResult("game-oracle")
    trials = samples or 20000
    for depth in (1, 2, 3):
        box = _random_unbiased_box(rng)
        seed = int(rng.integers(0, 2**32))
        config = GameConfig(box=box, n=depth, mode="monte_carlo", trials=trials, seed=seed)
        mc, _ = monte_carlo_game(config)
        exact = exact_total_information(GameConfig(box=box, n=depth))
        for k0 in range(2**depth):
            w = bin(k0).count("1")
            p_exact = exact.classes[w].p_correct
            count = int(mc.counts[k0])
            if count == 0:
                continue
            se = math.sqrt(max(p_exact * (1 - p_exact), 1e-12) / count)
            res.check(
                abs(float(mc.p_hat[k0]) - p_exact) <= 5 * se,
                f"depth {depth} K={k0 + 1}: {mc.p_hat[k0]:.4f} vs {p_exact:.4f}",
            )
    return res


def suite_boundary_coherence(rng, samples=None) -> SuiteResult:
    """Threshold scan flags exactly the boxes beyond the IC quadratic."""
    res = SuiteResult("boundary-coherence")
    for i in range(21):
        e = i * 0.05
        box = isotropic_box(e)
        witness = ic_threshold_scan(box, n_max=14)
        s_ic = 8 * e * e
        should_violate = s_ic > 4 + 1e-9
        res.check(
            (witness is not None) == should_violate,
            f"e={e:.2f}: witness={witness}, s_ic={s_ic:.3f}",
        )
    return res


SUITES: dict[str, Callable] = {
    "vertex-census": suite_vertex_census,
    "affine": suite_affine,
    "symmetry": suite_symmetry,
    "amgm": suite_amgm,
    "dominance": suite_dominance,
    "geometry": suite_geometry,
    "permutation": suite_permutation,
    "equality-clause": suite_equality_clause,
    "local-soundness": suite_local_soundness,
    "closed-form": suite_closed_form,
    "ray-dominance": suite_ray_dominance,
    "merge-case-a": suite_merge_case_a,
    "no-merge-case-b": suite_no_merge_case_b,
    "game-composition": suite_game_composition,
    "game-oracle": suite_game_oracle,
    "boundary-coherence": suite_boundary_coherence,
}


def run_suites(
    names: list[str] | None = None, seed: int = 0, samples: int | None = None
) -> list[SuiteResult]:
    """Run the selected (default: all) suites with a fixed seed."""
    selected = names or list(SUITES)
    results = []
    for name in selected:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
        rng = np.random.default_rng(seed)
        results.append(SUITES[name](rng, samples))
    return results

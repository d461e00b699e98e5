"""Box construction, validation, mixing, sampling and serialization."""

import numpy as np
import pytest

from nsboxes import (
    CorrelatorVector,
    JointBox,
    LocalLabel,
    NegativeWeight,
    NonlocalLabel,
    SignallingBox,
    WeightSumMismatch,
    box_from_correlators,
    box_from_dict,
    box_to_dict,
    correlators_of,
    isotropic_box,
    make_local,
    make_nonlocal,
    marginals_of,
    maximally_mixed,
    mix,
    pr_box,
    sample,
    sample_many,
    validate,
    vertex_box,
    vertex_names,
)


def nonlocal_table_oracle(mu, nu, sigma):
    """Independent reconstruction of the extreme-box table from its defining rule."""
    p = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    if (a + b) % 2 == (x * y + mu * x + nu * y + sigma) % 2:
                        p[a, b, x, y] = 0.5
    return p


def correlator_oracle(box):
    """Correlators by direct summation over the table."""
    out = []
    for x in range(2):
        for y in range(2):
            c = 0.0
            for a in range(2):
                for b in range(2):
                    c += box.p[a, b, x, y] * (1.0 if a == b else -1.0)
            out.append(c)
    return tuple(out)


def test_pr_box_table_matches_defining_rule():
    assert np.array_equal(pr_box().p, nonlocal_table_oracle(0, 0, 0))


def test_all_nonlocal_tables_match_defining_rule():
    for mu in (0, 1):
        for nu in (0, 1):
            for sigma in (0, 1):
                box = make_nonlocal(NonlocalLabel(mu, nu, sigma))
                assert np.array_equal(box.p, nonlocal_table_oracle(mu, nu, sigma))


def test_nonlocal_correlators_closed_form():
    # C_xy = (-1)^(xy + mu x + nu y + sigma), entries +-1, odd count of -1
    for mu in (0, 1):
        for nu in (0, 1):
            for sigma in (0, 1):
                box = make_nonlocal(NonlocalLabel(mu, nu, sigma))
                c = correlators_of(box)
                m = c.as_matrix()
                for x in range(2):
                    for y in range(2):
                        assert m[x, y] == (-1.0) ** (
                            x * y + mu * x + nu * y + sigma
                        )
                negatives = sum(1 for v in c.as_tuple() if v == -1.0)
                assert negatives % 2 == 1


def test_sigma_flips_output_parity():
    flipped = make_nonlocal(NonlocalLabel(0, 0, 1))
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    expected = 0.5 if (a ^ b) == (x & y) ^ 1 else 0.0
                    assert flipped.p[a, b, x, y] == expected


def test_nonlocal_100_correlators():
    c = correlators_of(make_nonlocal(NonlocalLabel(1, 0, 0)))
    assert c.as_tuple() == (1.0, 1.0, -1.0, 1.0)


def test_local_deterministic_outputs():
    always_zero = make_local(LocalLabel(0, 0, 0, 0))
    assert correlators_of(always_zero).as_tuple() == (1.0, 1.0, 1.0, 1.0)
    joint_flip = make_local(LocalLabel(0, 1, 0, 1))
    assert correlators_of(joint_flip).as_tuple() == (1.0, 1.0, 1.0, 1.0)
    identity = make_local(LocalLabel(1, 0, 1, 0))  # a = x, b = y
    assert correlators_of(identity).as_tuple() == (1.0, -1.0, -1.0, 1.0)


def test_local_correlators_factorize():
    for m in (0, 1):
        for n in (0, 1):
            for s in (0, 1):
                for t in (0, 1):
                    box = make_local(LocalLabel(m, n, s, t))
                    mat = correlators_of(box).as_matrix()
                    a_of = [(-1.0) ** ((m & x) ^ n) for x in range(2)]
                    b_of = [(-1.0) ** ((s & y) ^ t) for y in range(2)]
                    for x in range(2):
                        for y in range(2):
                            assert mat[x, y] == a_of[x] * b_of[y]


def test_maximally_mixed():
    box = maximally_mixed()
    assert np.all(box.p == 0.25)
    assert correlators_of(box).as_tuple() == (0.0, 0.0, 0.0, 0.0)
    margs = marginals_of(box)
    assert margs.unbiased
    assert np.all(margs.p_a_given_x == 0.5)


def test_label_validation():
    with pytest.raises(ValueError):
        NonlocalLabel(0, 2, 0)
    with pytest.raises(ValueError):
        LocalLabel(0, 0, -1, 0)


def test_mix_identity():
    assert np.array_equal(mix([(1.0, pr_box())]).p, pr_box().p)


def test_mix_with_noise():
    mixed = mix([(0.5, pr_box()), (0.5, maximally_mixed())])
    assert correlators_of(mixed).as_tuple() == (0.5, 0.5, 0.5, -0.5)


def test_mix_two_vertices_and_noise():
    mixed = mix(
        [
            (0.5, make_nonlocal(NonlocalLabel(0, 0, 0))),
            (0.3, make_nonlocal(NonlocalLabel(1, 0, 0))),
            (0.2, maximally_mixed()),
        ]
    )
    c = correlators_of(mixed)
    assert np.allclose(c.as_tuple(), (0.8, 0.8, 0.2, -0.2), atol=1e-15)


def test_mix_rejects_bad_weights():
    with pytest.raises(NegativeWeight):
        mix([(-0.1, pr_box()), (1.1, maximally_mixed())])
    with pytest.raises(WeightSumMismatch):
        mix([(0.5, pr_box()), (0.4, maximally_mixed())])


def test_correlators_affine_in_weights():
    rng = np.random.default_rng(7)
    names = vertex_names()
    for _ in range(200):
        p = vertex_box(names[rng.integers(len(names))])
        q = vertex_box(names[rng.integers(len(names))])
        w = float(rng.random())
        lhs = np.array(correlators_of(mix([(w, p), (1 - w, q)])).as_tuple())
        rhs = w * np.array(correlators_of(p).as_tuple())
        rhs += (1 - w) * np.array(correlators_of(q).as_tuple())
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_marginals_pr_unbiased():
    margs = marginals_of(pr_box())
    assert margs.unbiased
    assert np.all(margs.p_a_given_x == 0.5)
    assert np.all(margs.p_b_given_y == 0.5)


def test_marginals_local_biased():
    margs = marginals_of(make_local(LocalLabel(0, 0, 0, 0)))
    assert not margs.unbiased
    assert margs.p_a_given_x[0, 0] == 1.0
    assert margs.p_a_given_x[1, 0] == 1.0


def test_nonlocal_mixtures_stay_unbiased():
    rng = np.random.default_rng(3)
    for _ in range(50):
        w = rng.random(9)
        w /= w.sum()
        terms = [(w[8], maximally_mixed())]
        idx = 0
        for m in (0, 1):
            for n in (0, 1):
                for s in (0, 1):
                    terms.append((w[idx], make_nonlocal(NonlocalLabel(m, n, s))))
                    idx += 1
        assert marginals_of(mix(terms)).unbiased


def signalling_table():
    # Alice's output copies Bob's input: rows normalized but signalling
    p = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            p[y, 0, x, y] = 1.0
    return JointBox(p)


def test_marginals_reject_signalling():
    with pytest.raises(SignallingBox):
        marginals_of(signalling_table())


def test_validate_vertices_exact():
    for name in vertex_names():
        report = validate(vertex_box(name))
        assert report.normalization_residual == 0.0
        assert report.positivity_residual == 0.0
        assert report.signalling_residual == 0.0
        assert report.ok


def test_validate_flags_bad_tables():
    bad_norm = np.full((2, 2, 2, 2), 0.25)
    bad_norm = bad_norm.copy()
    bad_norm[0, 0, 0, 0] = 0.6
    report = validate(JointBox(bad_norm))
    assert not report.normalized
    assert report.normalization_residual == pytest.approx(0.35)

    bad_pos = np.full((2, 2, 2, 2), 0.25).copy()
    bad_pos[0, 0, 0, 0] = -0.01
    bad_pos[1, 1, 0, 0] = 0.51
    report = validate(JointBox(bad_pos))
    assert not report.positive
    assert report.positivity_residual == pytest.approx(0.01)

    report = validate(signalling_table())
    assert not report.nonsignalling
    assert report.signalling_residual == 1.0


def test_validate_random_mixtures():
    rng = np.random.default_rng(11)
    names = vertex_names()
    for _ in range(100):
        w = rng.random(len(names))
        w /= w.sum()
        box = mix([(wi, vertex_box(n)) for wi, n in zip(w, names)])
        assert validate(box).ok


def test_sample_pr_support():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = sample(pr_box(), 0, 0, rng)
        assert a == b
    for _ in range(200):
        a, b = sample(pr_box(), 1, 1, rng)
        assert a != b


def test_sample_deterministic_given_seed():
    box = isotropic_box(0.3)
    draws1 = [sample(box, 0, 1, np.random.default_rng(5)) for _ in range(1)]
    draws2 = [sample(box, 0, 1, np.random.default_rng(5)) for _ in range(1)]
    assert draws1 == draws2
    rng1, rng2 = np.random.default_rng(5), np.random.default_rng(5)
    seq1 = [sample(box, x, y, rng1) for x in (0, 1) for y in (0, 1)]
    seq2 = [sample(box, x, y, rng2) for x in (0, 1) for y in (0, 1)]
    assert seq1 == seq2


def test_sample_many_statistics():
    # empirical C00 of a mixed box within 4 binomial standard deviations
    box = isotropic_box(0.3)
    rng = np.random.default_rng(123)
    n = 1_000_000
    a, b = sample_many(box, 0, 0, n, rng)
    agree = np.sum(a == b)
    c00_hat = (2 * agree - n) / n
    sigma = np.sqrt((1 - 0.3**2) / n)
    assert abs(c00_hat - 0.3) <= 4 * sigma


def test_box_from_correlators_roundtrip():
    c = CorrelatorVector(0.4, -0.2, 0.1, 0.9)
    box = box_from_correlators(c)
    assert validate(box).ok
    assert marginals_of(box).unbiased
    assert np.allclose(correlators_of(box).as_tuple(), c.as_tuple(), atol=1e-15)


def test_isotropic_box_correlators():
    c = correlators_of(isotropic_box(0.72))
    assert np.allclose(c.as_tuple(), (0.72, 0.72, 0.72, -0.72), atol=1e-15)


def test_json_order_is_xyab_row_major():
    d = box_to_dict(pr_box(), meta="NL000")
    assert d["meta"] == "NL000"
    flat = d["p"]
    assert len(flat) == 16
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    idx = x * 8 + y * 4 + a * 2 + b
                    assert flat[idx] == pr_box().p[a, b, x, y]


def test_json_roundtrip_exact():
    rng = np.random.default_rng(2)
    names = vertex_names()
    w = rng.random(len(names))
    w /= w.sum()
    box = mix([(wi, vertex_box(n)) for wi, n in zip(w, names)])
    again = box_from_dict(box_to_dict(box))
    assert np.array_equal(again.p, box.p)


def test_vertex_names_roundtrip():
    names = vertex_names()
    assert len(names) == 24
    assert names[0] == "NL000"
    assert names[8] == "L0000"
    for name in names:
        vertex_box(name)  # must not raise
    with pytest.raises(ValueError):
        vertex_box("X123")


def test_box_shape_checked():
    with pytest.raises(ValueError):
        JointBox(np.zeros((2, 2)))

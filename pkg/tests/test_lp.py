import random
from fractions import Fraction

import pytest

from oracles import exact_lp_optimum
from rigorkit import lp
from rigorkit.errors import AugmentationError, ParseError
from rigorkit.interval import Interval

I = Interval


def toy_max_x():
    # max x subject to x <= 1, x in [0, 2]
    return lp.make_problem([1.0], [I(0, 2)], aineq=[[1.0]], bineq=[1.0])


def random_problem(rng, n_max=20, m_max=20, with_eq=False):
    """Random feasible-and-bounded LP with dyadic data: bounds [0, ub],
    and the witness point x_hat below every constraint."""
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    c = [rng.randint(-8, 8) / 4 for _ in range(n)]
    a = [[rng.randint(-8, 8) / 4 for _ in range(n)] for _ in range(m)]
    ub = [rng.randint(1, 16) / 2 for _ in range(n)]
    x_hat = [rng.randint(0, 4) / 8 * u for u in ub]
    b = [sum(r * x for r, x in zip(row, x_hat)) + rng.randint(0, 16) / 4
         for row in a]
    aeq, beq = [], []
    if with_eq and n >= 2:
        for _ in range(rng.randint(1, min(3, n - 1))):
            row = [rng.randint(-4, 4) / 4 for _ in range(n)]
            aeq.append(row)
            beq.append(sum(r * x for r, x in zip(row, x_hat)))
    return lp.make_problem(c, [I(0, u) for u in ub], aineq=a, bineq=b,
                           aeq=aeq, beq=beq)


def test_clamp_dual_examples():
    d = lp.clamp_dual([], [0.5, -1e-9])
    assert d.z == (0.5, 0.0) and d.clamped
    d2 = lp.clamp_dual([3.0, -4.0], [0.0, 0.0])
    assert d2.y == (3.0, -4.0) and not d2.clamped


def test_certify_examples():
    p = toy_max_x()
    cert = lp.certify_upper_bound(p, lp.clamp_dual([], [1.0, 0.0, 0.0]))
    assert abs(cert.bound - 1.0) <= 4e-16

    cert2 = lp.certify_upper_bound(p, lp.clamp_dual([], [0.999, 0.0, 0.0]))
    assert 1.0 <= cert2.bound <= 1.0011
    assert cert2.delta_bound <= 0.002 + 1e-12

    p2 = lp.make_problem([1.0, 1.0], [I(0, 2), I(0, 2)],
                         aineq=[[1.0, 0.0], [0.0, 1.0]], bineq=[1.0, 1.0])
    cert3 = lp.certify_upper_bound(p2, lp.clamp_dual([], [1.0, 1.0, 0, 0, 0, 0]))
    assert abs(cert3.bound - 2.0) <= 8e-16


def test_certify_rejects_bad_dims_and_negative_z():
    p = toy_max_x()
    with pytest.raises(ValueError):
        lp.certify_upper_bound(p, lp.DualSolution((), (1.0,), False))
    with pytest.raises(ValueError):
        lp.certify_upper_bound(p, lp.DualSolution((), (-0.5, 0.0, 0.0), False))


def test_augment_examples():
    p = toy_max_x()
    pa = lp.augment_with_t(p, 0.5)
    opt, x = exact_lp_optimum(pa)
    assert opt == 1 and x[-1] == 0

    pa5 = lp.augment_with_t(p, 5.0)
    opt5, x5 = exact_lp_optimum(pa5)
    assert opt5 == 5 and x5[-1] == 1 and x5[0] == 0

    # generated problem has rows t <= 1 and t >= 0
    assert pa.aineq[-2][-1] == 1.0 and pa.bineq[-2] == 1.0
    assert pa.aineq[-1][-1] == -1.0 and pa.bineq[-1] == 0.0

    shifted = lp.make_problem([1.0], [I(1, 2)], aineq=[[1.0]], bineq=[1.5])
    with pytest.raises(AugmentationError):
        lp.augment_with_t(shifted, 0.5)


def test_solve_approx():
    p = toy_max_x()
    x, (y, z), obj = lp.solve_approx(p)
    assert abs(obj - 1.0) < 1e-9 and abs(x[0] - 1.0) < 1e-9
    assert abs(z[0] - 1.0) < 1e-9

    p2 = lp.make_problem([1.0, 1.0], [I(0, 1), I(0, 1)],
                         aineq=[[1.0, 1.0]], bineq=[1.0])
    _, _, obj2 = lp.solve_approx(p2)
    assert abs(obj2 - 1.0) < 1e-9


def test_certificate_soundness_and_fuzz_small_batch():
    rng = random.Random(909)
    gaps = []
    for trial in range(40):
        p = random_problem(rng, n_max=10, m_max=10, with_eq=(trial % 3 == 0))
        opt, _ = exact_lp_optimum(p)
        x, (y, z), _ = lp.solve_approx(p)
        cert = lp.certify_upper_bound(p, lp.clamp_dual(y, z))
        assert Fraction(cert.bound) >= opt
        gaps.append(float(Fraction(cert.bound) - opt))
        # adversarial fuzz up to 1e-1
        fy = [v + rng.uniform(-0.1, 0.1) for v in y]
        fz = [v + rng.uniform(-0.1, 0.1) for v in z]
        fuzzed = lp.certify_upper_bound(p, lp.clamp_dual(fy, fz))
        assert Fraction(fuzzed.bound) >= opt
    gaps.sort()
    median = gaps[len(gaps) // 2]
    assert median <= 1e-6


def test_problem_file_round_trip():
    p = lp.make_problem([1.0, -0.5], [I(0, 2), I(-1, 1)],
                        aineq=[[1.0, 2.0]], bineq=[1.5],
                        aeq=[[0.5, 0.5]], beq=[0.25])
    text = lp.problem_to_text(p)
    assert lp.problem_from_text(text) == p
    # decimals go through the interval layer's reader
    parsed = lp.problem_from_text(
        "vars 1\nobj 0 0.1\nbound 0 0..1\n")
    assert parsed.c[0] == 0.1


def test_problem_file_errors():
    with pytest.raises(ParseError):
        lp.problem_from_text("vars oops\n")
    with pytest.raises(ParseError):
        lp.problem_from_text("vars 2\nbound 0 0..1\n")  # missing bound for x1
    with pytest.raises(ParseError):
        lp.problem_from_text("vars 1\nbound 0 0..1\nwat 3\n")


def test_dual_file_round_trip():
    y, z = lp.dual_from_text(lp.dual_to_text((0.25, -1.5), (1.0, 0.0)))
    assert y == (0.25, -1.5) and z == (1.0, 0.0)
    y2, z2 = lp.dual_from_text("\n1.5 2.5\n")
    assert y2 == () and z2 == (1.5, 2.5)


def test_digest_is_stable():
    p = toy_max_x()
    d = lp.clamp_dual([], [1.0, 0.0, 0.0])
    c1 = lp.certify_upper_bound(p, d)
    c2 = lp.certify_upper_bound(p, d)
    assert c1.inputs_digest == c2.inputs_digest

"""Smoke test for the Python bindings.

Install the extension first, e.g. `pip install ./crates/python` or
`maturin develop` inside crates/python, then run `python python/smoke_test.py`.
"""

import math
import random

import dyadic_bellman as db


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    r = db.bellman_thm4(2.0, 2.0, 2.0, 1.0)
    assert close(r.value, 3.0 + 2.0 * math.sqrt(2.0)), r
    assert r.branch == "thm4_case_i" and r.alpha is not None
    assert db.bellman_thm4(2.0, 1.0, 3.0, 1.0).value == 4.0

    r = db.bellman_thm3(2.0, 4.0 / 3.0, 4.0 / 3.0, 1.0, 1.0, 8.0)
    assert close(r.value, 18.0, 1e-10) and r.branch == "thm3_lower"
    assert close(r.threshold, 4.0)

    r2 = db.bellman_thm2([(2.0, 1.0)], 1.0, G="maxpow:1.3333333333333333:8", h=0.0)
    assert close(r2.value, 18.0, 1e-8), r2
    assert close(r2.sigma, 0.25)

    for q in (1.1, 2.0, 5.0):
        for y in (0.0, 0.3, 0.999, 1.0):
            assert abs(db.hq(q, db.omega_q(q, y)) - y) <= 1e-12

    alpha, saturated = db.solve_alpha(2.0, 3.0, 1.0, 1.0)
    assert 0.25 < alpha < 0.5 and not saturated

    assert close(db.solve_sigma([(2.0, 1.0)], 1.0), 0.25)
    assert db.rearrange([(0.5, 1.0), (0.5, 3.0)]) == [(0.5, 3.0), (0.5, 1.0)]

    m = db.dyadic_maximal(2, [1.0, 0.0, 0.0, 3.0])
    assert m == [1.0, 1.0, 1.5, 3.0], m

    rng = random.Random(0)
    for _ in range(20):
        pieces = [(rng.uniform(0.05, 1.0), rng.uniform(0.01, 10.0)) for _ in range(rng.randint(1, 6))]
        total = sum(length for length, _ in pieces)
        pieces = db.rearrange([(length / total, v) for length, v in pieces])
        mean = sum(length * v for length, v in pieces)
        norm = db.lorentz_qnorm(pieces, 1.5, 3.0)
        assert db.delta_functional(pieces, 1.5, 3.0) <= db.bellman_thm4(1.5, 3.0, norm, mean).value * (1 + 1e-10)

    violations, _ = db.lemma2_trials(8, 50, 3)
    assert violations == 0

    try:
        db.bellman_thm4(2.0, 3.0, 0.1, 1.0)
    except db.DomainError as e:
        assert "case (i)" in str(e)
    else:
        raise AssertionError("expected DomainError")

    print("smoke test passed")


if __name__ == "__main__":
    main()

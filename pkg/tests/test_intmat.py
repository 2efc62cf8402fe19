import random
from itertools import product

import pytest

from circleconj.exactnum import UnimodularMatrix2
from circleconj.intmat import (
    StructuredMatrix,
    mat_identity,
    mat_mul,
    mat_vec,
    solve_congruence,
    unit_upper_inverse,
)


def random_unimodular(rng, steps=4):
    M = UnimodularMatrix2.identity()
    for _ in range(steps):
        M = M @ UnimodularMatrix2(0, 1, 1, rng.randint(1, 4))
    if rng.random() < 0.5:
        M = M.inverse()
    return M


def random_structured(rng, n):
    m = n - 2
    S = tuple(tuple(rng.randint(-4, 4) for _ in range(m)) for _ in range(2))
    B = tuple(
        tuple(1 if i == j else (rng.randint(-4, 4) if j > i else 0) for j in range(m))
        for i in range(m)
    )
    return StructuredMatrix(random_unimodular(rng), random_unimodular(rng), S, B)


def test_mat_basics():
    I3 = mat_identity(3)
    M = ((1, 2, 0), (0, 1, 3), (0, 0, 1))
    assert mat_mul(I3, M) == M
    assert mat_mul(M, I3) == M
    assert mat_vec(M, (1, 1, 1)) == (3, 4, 1)


def test_unit_upper_inverse_exact():
    rng = random.Random(7)
    for _ in range(60):
        m = rng.randint(0, 4)
        B = tuple(
            tuple(1 if i == j else (rng.randint(-5, 5) if j > i else 0) for j in range(m))
            for i in range(m)
        )
        Binv = unit_upper_inverse(B)
        assert mat_mul(B, Binv) == mat_identity(m)
        assert mat_mul(Binv, B) == mat_identity(m)
        for i in range(m):
            assert Binv[i][i] == 1
            assert all(Binv[i][j] == 0 for j in range(i))


def test_solve_congruence_agrees_with_brute_force():
    rng = random.Random(21)
    for _ in range(300):
        k = rng.randint(1, 12)
        m = rng.randint(1, 3)
        coeffs = [rng.randint(-10, 10) for _ in range(m)]
        target = rng.randint(-15, 15)
        x = solve_congruence(coeffs, target, k)
        feasible = any(
            sum(c * xi for c, xi in zip(coeffs, cand)) % k == target % k
            for cand in product(range(k), repeat=m)
        )
        assert (x is not None) == feasible
        if x is not None:
            assert sum(c * xi for c, xi in zip(coeffs, x)) % k == target % k


def test_solve_congruence_edge_cases():
    assert solve_congruence([], 0, 5) == []
    assert solve_congruence([], 3, 5) is None
    assert solve_congruence([0, 0], 10, 5) == [0, 0]
    assert solve_congruence([0, 0], 3, 5) is None
    assert solve_congruence([4, 6], 2, 10) is not None
    assert solve_congruence([4, 6], 1, 10) is None
    # modulus one is always trivially solvable
    assert solve_congruence([3, 7], -2, 1) == [0, 0]


def test_structured_matrix_validation():
    I2 = UnimodularMatrix2.identity()
    with pytest.raises(ValueError):
        StructuredMatrix(I2, I2, ((0,),), ((1,),))  # S needs two rows
    with pytest.raises(ValueError):
        StructuredMatrix(I2, I2, ((0,), (0, 0)), ((1,),))
    with pytest.raises(ValueError):
        StructuredMatrix(I2, I2, ((0,), (0,)), ((2,),))  # diagonal must be 1
    with pytest.raises(ValueError):
        StructuredMatrix(I2, I2, ((0, 0), (0, 0)), ((1, 0), (5, 1)))


def test_structured_identity_and_blocks():
    M = StructuredMatrix.identity(4)
    assert M.n == 4
    assert M.is_identity()
    assert M.ntilde() == mat_identity(4)
    assert M.atilde() == mat_identity(4)
    assert M.assembled() == mat_identity(4)


def test_structured_inverse_and_assembly():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(2, 5)
        M = random_structured(rng, n)
        Nt = M.ntilde()
        assert mat_mul(Nt, M.ntilde_inverse()) == mat_identity(n)
        assert mat_mul(M.ntilde_inverse(), Nt) == mat_identity(n)
        assert M.assembled() == mat_mul(Nt, M.atilde())


def test_structured_json_round_trip():
    rng = random.Random(11)
    for _ in range(20):
        M = random_structured(rng, rng.randint(2, 5))
        assert StructuredMatrix.from_json(M.to_json()) == M
    with pytest.raises(ValueError):
        StructuredMatrix.from_json({"f_alpha": [1, 0, 0, 1], "A": [1, 0, 0, 1], "S": [[], []], "B": [], "x": 1})

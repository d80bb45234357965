import random
from fractions import Fraction

import pytest

from weylauto.linalg import InconsistentSystem, SparseEliminator, invert_matrix, rank, solve_exact


def _rand_matrix(rng, rows, cols, lo=-3, hi=3):
    return [[Fraction(rng.randint(lo, hi)) for _ in range(cols)] for _ in range(rows)]


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))] for i in range(len(a))]


def test_invert_matrix():
    rng = random.Random(1)
    for _ in range(30):
        n = rng.randint(1, 5)
        m = _rand_matrix(rng, n, n)
        try:
            inv = invert_matrix(m)
        except ZeroDivisionError:
            continue
        eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        assert _matmul(m, inv) == eye and _matmul(inv, m) == eye
    with pytest.raises(ZeroDivisionError):
        invert_matrix([[1, 2], [2, 4]])


def test_solve_exact_matches_inverse():
    rng = random.Random(2)
    done = 0
    while done < 20:
        n = rng.randint(1, 5)
        m = _rand_matrix(rng, n, n)
        try:
            inv = invert_matrix(m)
        except ZeroDivisionError:
            continue
        b = [Fraction(rng.randint(-5, 5)) for _ in range(n)]
        sol = solve_exact(({j: m[i][j] for j in range(n)}, b[i]) for i in range(n))
        assert [sol.get(j, 0) for j in range(n)] == [sum(inv[j][k] * b[k] for k in range(n)) for j in range(n)]
        done += 1


def _dense_rank(m):
    # independent oracle: row echelon form on a dense copy
    m = [row[:] for row in m]
    r = 0
    for col in range(len(m[0])):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            f = m[i][col] / m[r][col]
            m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return r


def test_rank_matches_dense_oracle():
    rng = random.Random(3)
    for _ in range(40):
        r = rng.randint(1, 4)
        a = _matmul(_rand_matrix(rng, 6, r, -9, 9), _rand_matrix(rng, r, 6, -9, 9))
        got = rank({j: v for j, v in enumerate(row) if v} for row in a)
        assert got == _dense_rank(a) <= r


def test_consistency_conditions_with_rhs_basis():
    # x = a, x = b  ->  condition a - b = 0
    elim = SparseEliminator(2)
    elim.add({"x": 1}, [1, 0], "first")
    elim.add({"x": 1}, [0, 1], "second")
    res = elim.result()
    assert res.rank == 1
    assert res.conditions == [(Fraction(-1), Fraction(1))]
    assert res.condition_labels == ["second"]
    assert res.is_consistent([2, 2]) and not res.is_consistent([1, 2])
    assert res.solve([3, 3]) == {"x": 3}
    with pytest.raises(InconsistentSystem):
        res.solve([1, 2])


def test_free_columns_and_determined():
    elim = SparseEliminator(1)
    elim.add({"x": 1, "y": 1}, [2])
    elim.add({"z": 2}, [4])
    res = elim.result()
    assert res.determined("z") and not res.determined("x") and not res.determined("y")
    sol = res.solve([1])
    assert sol["z"] == 2 and sol["x"] + sol["y"] == 2
    (free,) = res.free_columns()
    sol = res.solve([1], free_values={free: 5})
    assert sol[free] == 5 and sol["x"] + sol["y"] == 2


def test_random_systems_solutions_satisfy_rows():
    rng = random.Random(4)
    for _ in range(40):
        rows = []
        x = {j: Fraction(rng.randint(-3, 3)) for j in range(5)}
        for _ in range(rng.randint(1, 7)):
            row = {j: Fraction(rng.randint(-2, 2)) for j in range(5) if rng.random() < 0.6}
            rows.append((row, sum((v * x[j] for j, v in row.items()), Fraction(0))))
        sol = solve_exact(rows)
        for row, rhs in rows:
            assert sum((v * sol.get(j, 0) for j, v in row.items()), Fraction(0)) == rhs

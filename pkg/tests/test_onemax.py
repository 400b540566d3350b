from jumplab.bits import BitString, RngStream
from jumplab.objective import JumpObjective, QueryOracle, onemax
from jumplab.onemax import (
    BLANKED,
    DirectView,
    SubcubeView,
    rls_optimize,
    simulate_on_subcube,
    subcube_budget,
)


def test_rls_solves_onemax(rng):
    oracle = QueryOracle(onemax(40))
    best, v = rls_optimize(DirectView(oracle, rng), None)
    assert v == 40 and oracle.reveal(best) == BitString.ones(40)


def test_rls_respects_budget(rng):
    oracle = QueryOracle(onemax(200))
    view = DirectView(oracle, rng)
    rls_optimize(view, 25)
    assert view.evaluations == 25 and oracle.query_count == 25


def _cube(n, ell, xs, ys):
    oracle = QueryOracle(JumpObjective(n, ell))
    x = oracle.submit(BitString.from_str(xs))
    y = oracle.submit(BitString.from_str(ys))
    return oracle, x, y


def test_subcube_view_reports_inner_onemax(rng):
    oracle, x, y = _cube(10, 1, "1110000011", "1101110010")
    a = (oracle.reveal(x.handle).value ^ oracle.reveal(y.handle).value).bit_count()
    view = SubcubeView(oracle, rng, x.handle, y.handle, a, x.fitness, y.fitness)
    diff = oracle.reveal(x.handle).value ^ oracle.reveal(y.handle).value
    for _ in range(200):
        h, v = view.uniform()
        assert v == (oracle.reveal(h).value & diff).bit_count()


def test_subcube_solver_sets_all_free_bits(rng):
    oracle, x, y = _cube(12, 2, "110000110000", "101111000000")
    diff = oracle.reveal(x.handle).value ^ oracle.reveal(y.handle).value
    a = diff.bit_count()
    u = simulate_on_subcube(oracle, rng, x.handle, y.handle, a, x.fitness, y.fitness,
                            budget=400)
    bits = oracle.reveal(u).value
    assert bits & diff == diff
    assert (bits ^ oracle.reveal(x.handle).value) & ~diff == 0


def test_zero_dimensional_cube_returns_x(rng):
    oracle, x, _ = _cube(6, 0, "110000", "110000")
    assert simulate_on_subcube(oracle, rng, x.handle, x.handle, 0, 2, 2) == x.handle


def test_blanked_points_are_never_accepted():
    # visible endpoints, but the cube's top corner (weight 7) is blanked
    oracle, x, y = _cube(10, 3, "1111100000", "1111011000")
    assert x.fitness and y.fitness
    for seed in range(20):
        view = SubcubeView(oracle, RngStream(seed), x.handle, y.handle, 3, x.fitness,
                           y.fitness)
        best, v = rls_optimize(view, 30)
        assert v != BLANKED and oracle.fitness(best) != 0


def test_budget_grows_with_dimension():
    assert subcube_budget(4) < subcube_budget(16) < subcube_budget(64)

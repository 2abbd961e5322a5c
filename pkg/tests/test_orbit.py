import numpy as np
import pytest

from germstable.jet_funcs.germ import PolynomialMap
from germstable.jet_funcs.jets import UniJet
from germstable.proc_funcs.orbit import (
    CaptureKind,
    OrbitStatus,
    asymptoticity_test,
    capture_report,
    in_chart,
    nearest_root_of_unity,
    orbit_rows,
    simulate_orbit,
    simulate_orbits,
    tangency_radius,
)
from germstable.proc_funcs.reduction import DirectionKind
from germstable.proc_funcs.stable import node_stable_set, parabolic_curve_set, picard_solve_parabolic, weight_escape
from germstable.util_funcs.errors import TailTooShort

ZERO_CURVE = UniJet([0], 16)


@pytest.fixture
def parabolic_map():
    """(x - x^2, y / 2)"""
    return PolynomialMap.from_coefficients([[0, 0], [1, 0], [-1, 0]], [[0, 0.5]])


@pytest.fixture
def node_set(node_pair, node_directions):
    return node_stable_set(node_pair, node_directions[0])


def seeds_in(node_set, floor=1e-2):
    x = node_set.region.mesh(10, 5, floor=floor).ravel()
    y = 0.5 * x**2 * np.exp(2j * np.pi * np.arange(x.size) / 7)
    return x, y


class TestSimulateOrbit:
    def test_parabolic_convergence(self, parabolic_map):
        record = simulate_orbit(parabolic_map, (0.1, 0.1), conv_radius=1e-3)
        assert record.status == OrbitStatus.CONVERGED_TO_ORIGIN
        assert record.tangent == pytest.approx(1)

    def test_escape(self):
        pmap = PolynomialMap.from_coefficients([[0, 0], [-1, 0]], [[0, 2]])
        record = simulate_orbit(pmap, (0.1, 0.1))
        assert record.status == OrbitStatus.ESCAPED
        assert abs(record.ys[-1]) == pytest.approx(0.1 * 2**record.steps)

    def test_origin(self, parabolic_map):
        record = simulate_orbit(parabolic_map, (0, 0), r=1, gamma2=ZERO_CURVE, orders=(1, 2))
        assert record.status == OrbitStatus.CONVERGED_TO_ORIGIN
        assert record.is_origin
        for column in record.diagnostics.values():
            assert not np.any(np.isnan(column))

    def test_undecided(self, parabolic_map):
        record = simulate_orbit(parabolic_map, (0.1, 0.1), max_iter=10)
        assert record.status == OrbitStatus.UNDECIDED
        assert record.steps == 10

    def test_pool_keeps_start_order(self, parabolic_map):
        starts = [(0.1, 0.1), (0.05j, 0), (0.2, -0.1)]
        serial = simulate_orbits(parabolic_map, starts, max_iter=500)
        pooled = simulate_orbits(parabolic_map, starts, workers=2, max_iter=500)
        for a, b in zip(serial, pooled):
            assert a.start == b.start
            assert np.array_equal(a.xs, b.xs)

    def test_nearest_root_of_unity(self):
        assert nearest_root_of_unity(1j, 4) == pytest.approx(1j)
        assert nearest_root_of_unity(0.1 - 0.01j, 3) == 1
        assert nearest_root_of_unity(-1 + 0.1j, 2) == pytest.approx(-1)


class TestLeauFatou:
    @pytest.mark.slow
    @pytest.mark.parametrize(
        "fixture, start, r",
        [("node_map", (0.1, 0.005), 2), ("saddle_map", (0.1, 0), 1)],
    )
    def test_estimate_at_one_hundred_thousand(self, request, fixture, start, r):
        pmap = request.getfixturevalue(fixture)
        record = simulate_orbit(pmap, start, max_iter=100000, r=r, stop_when_converged=False)
        assert record.steps == 100000
        value = record.diagnostics["leau_fatou"][100000]
        assert abs(value - 1) <= 0.01

    def test_tangency_of_real_orbit(self, saddle_map):
        record = simulate_orbit(saddle_map, (0.1, 0), max_iter=200, r=1)
        assert np.all(record.diagnostics["tangency"] == 0)

    @pytest.mark.slow
    def test_tangency_of_complex_node_orbit(self, node_map, node_pair):
        record = simulate_orbit(
            node_map, (0.1 + 0.02j, 5e-4), max_iter=10000, reduced=node_pair, stop_when_converged=False
        )
        assert record.steps == 10000
        assert np.all(np.abs(record.ys) < np.abs(record.xs) ** (node_pair.p + 1))
        assert abs(record.diagnostics["tangency"][0]) > 0.1
        assert abs(record.diagnostics["tangency"][10000]) <= 1e-2

    def test_tangency_exponent_stays_below_k_plus_p(self, node_pair, saddle_pair):
        assert tangency_radius(node_pair, 1) == 0
        assert tangency_radius(node_pair, -1) == 0
        assert tangency_radius(saddle_pair, 1) == 0


class TestAsymptoticity:
    def test_axis_orbit(self, saddle_map):
        record = simulate_orbit(saddle_map, (0.1, 0), conv_radius=1e-3)
        verdicts = asymptoticity_test(record, ZERO_CURVE, 4)
        assert [v.order for v in verdicts] == [1, 2, 3, 4]
        assert all(v.passed and v.C == 0 for v in verdicts)

    def test_jordan_block_orbit_fails(self):
        pmap = PolynomialMap.from_coefficients([[0, 0.5], [0.5, 0]], [[0, 0.5]])
        record = simulate_orbit(pmap, (0.1, 0.05))
        assert record.status == OrbitStatus.CONVERGED_TO_ORIGIN
        assert not asymptoticity_test(record, ZERO_CURVE, 1)[0].passed

    def test_requires_convergence(self):
        pmap = PolynomialMap.from_coefficients([[0, 0], [-1, 0]], [[0, 2]])
        with pytest.raises(TailTooShort):
            asymptoticity_test(simulate_orbit(pmap, (0.1, 0.1)), ZERO_CURVE, 2)

    def test_hyperbolic_containment(self, rng):
        pmap = PolynomialMap.from_coefficients([[0, 0], [0.6, 0]], [[0, 0.3]])
        passing = []
        for n in range(200):
            x0 = rng.uniform(0.1, 0.5) * np.exp(2j * np.pi * rng.uniform())
            y0 = 0 if n % 2 else rng.uniform(0.05, 0.2) * np.exp(2j * np.pi * rng.uniform())
            record = simulate_orbit(pmap, (x0, y0), conv_radius=1e-8, window=50)
            assert record.status == OrbitStatus.CONVERGED_TO_ORIGIN
            if all(v.passed for v in asymptoticity_test(record, ZERO_CURVE, 6)):
                passing.append(n)
        assert passing == list(range(1, 200, 2))

    @pytest.mark.slow
    def test_node_basin(self, node_map, node_pair, node_set):
        x, y = seeds_in(node_set)
        assert np.all(node_set.contains(x, y))
        records = simulate_orbits(node_map, zip(x, y), max_iter=20000, conv_radius=1e-2, window=50)
        for record in records:
            assert record.status == OrbitStatus.CONVERGED_TO_ORIGIN
            assert all(v.passed for v in asymptoticity_test(record, node_pair.gamma2, 8))
            if abs(record.xs[0]) >= 0.03:
                for l in range(6):
                    w = weight_escape(node_pair, record.xs, l)
                    assert w[2000] < 1e-6 * w[10]


class TestCapture:
    def test_node_orbits_are_assigned(self, node_map, node_pair, node_set):
        x, y = seeds_in(node_set, floor=0.3)
        starts = list(zip(x[:5], y[:5])) + [(0, 0)]
        records = simulate_orbits(node_map, starts, max_iter=5000, conv_radius=5e-2, window=10)
        report = capture_report(records, [node_set], node_pair)
        assert report.excluded == (5,)
        assert len(report.assigned) == 5
        assert all(entry.set_type == "NodeBasin" and entry.entry_index == 0 for entry in report.assigned)

    def test_saddle_side_orbit_is_not_assigned(self, node_map, node_pair, node_set):
        record = simulate_orbit(node_map, (-0.05, 0), max_iter=5000, conv_radius=5e-2, window=10)
        (entry,) = capture_report([record], [node_set], node_pair).entries
        assert entry.kind == CaptureKind.UNASSIGNED
        assert entry.direction == pytest.approx(-1)

    def test_saddle_orbits_avoid_the_node_basin(self, node_map, node_pair, node_directions, node_set):
        (saddle,) = [d for d in node_directions if d.kind == DirectionKind.SADDLE]
        curve = parabolic_curve_set(picard_solve_parabolic(node_pair, saddle))
        starts = [(-0.02, 0), (-0.02 + 1e-3j, 0), (-0.02, 1e-6), (-0.02, 1e-4j)]
        records = simulate_orbits(node_map, starts, max_iter=20000, conv_radius=1e-2, window=10)
        report = capture_report(records, [node_set, curve], node_pair)
        assert report.entries[0].set_type == "ParabolicCurve"
        for entry, record in zip(report.entries, records):
            assert entry.set_type != "NodeBasin"
            if entry.kind == CaptureKind.ASSIGNED:
                assert entry.direction == pytest.approx(-1)
                assert np.max(np.abs(record.ys[entry.entry_index :])) <= 1e-8
        assert [entry.kind for entry in report.entries[2:]] == [CaptureKind.NOT_CONVERGING] * 2

    def test_escaping_orbit(self, node_pair, node_set):
        pmap = PolynomialMap.from_coefficients([[0, 0], [-1, 0]], [[0, 2]])
        (entry,) = capture_report([simulate_orbit(pmap, (0.1, 0.1))], [node_set], node_pair).entries
        assert entry.kind == CaptureKind.NOT_CONVERGING
        assert entry.to_dict()["assigned"] is False


class TestOrbitRows:
    def test_columns(self, saddle_map):
        record = simulate_orbit(saddle_map, (0.1, 0.01), max_iter=20, r=1, gamma2=ZERO_CURVE, orders=(1,))
        header, rows = orbit_rows(record)
        assert header[:5] == ["j", "re_x", "im_x", "re_y", "im_y"]
        assert "re_leau_fatou" in header and "tangency" in header and "asym_1" in header
        assert len(rows) == record.xs.size
        assert all(len(row) == len(header) for row in rows)

    def test_in_rotated_chart(self, node_map, node_pair):
        record = simulate_orbit(node_map, (0.05, 0.001), max_iter=20)
        moved = in_chart(record, node_pair.rotated(-1).germ)
        assert np.allclose(moved.xs, -record.xs)
        assert np.allclose(moved.ys, record.ys)

"""End-to-end acceptance suite.

Eight criteria, one test each; the terminal summary (tests/conftest.py)
prints a PASS/FAIL line per criterion.  The heavier tests reuse one shared
100k-request NSFNET run.
"""

import math
import random
import statistics
import time

import pytest

from eonprotect.availability import (
    ParallelSystem,
    SeriesParallelSystem,
    SeriesSystem,
    ava_dcyc_update,
    ava_dsbpss_update,
    monte_carlo_availability,
    parallel_availability,
    series_availability,
    series_parallel_availability,
    structure_series,
)
from eonprotect.cli import CSV_COLUMNS, emit, run_cell
from eonprotect.sim import Scenario, Simulation, inject_single_failures


# ---------------------------------------------------------------------------
# Shared 100k-request run (used by the gating and performance criteria)
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def hundred_k_run():
    sc = Scenario(
        load_erlang=15,
        a_th=0.9,
        mode="dsbpss",
        avg_link_availability=0.999999,
        n_requests=100_000,
        seed=1,
    )
    t0 = time.perf_counter()
    sim = Simulation(sc)
    report = sim.run()
    elapsed = time.perf_counter() - t0
    return sim, report, elapsed


# ---------------------------------------------------------------------------
# Criterion 1: analytical availability vs Monte-Carlo oracle
# ---------------------------------------------------------------------------


def _random_system(rng):
    a = lambda: rng.uniform(0.4, 0.9)
    kind = rng.choice(("series", "parallel", "series-parallel"))
    if kind == "series":
        links = tuple(a() for _ in range(rng.randint(2, 6)))
        return SeriesSystem(links), series_availability(list(links))
    if kind == "parallel":
        branches = tuple(
            tuple(a() for _ in range(rng.randint(1, 4)))
            for _ in range(rng.randint(2, 4))
        )
        exact = parallel_availability([math.prod(b) for b in branches])
        return ParallelSystem(branches), exact
    protected = tuple((a(), a()) for _ in range(rng.randint(1, 4)))
    unprotected = tuple(a() for _ in range(rng.randint(0, 4)))
    exact = series_parallel_availability(list(protected), list(unprotected))
    return SeriesParallelSystem(protected, unprotected), exact


def test_availability_calculus_vs_oracle():
    rng = random.Random(20240901)
    t0 = time.perf_counter()
    for i in range(200):
        system, exact = _random_system(rng)
        est, err = monte_carlo_availability(system, 10**6, seed=i)
        assert err > 0
        assert abs(est - exact) < 3 * err, (system, exact, est, err)
    assert time.perf_counter() - t0 < 60


# ---------------------------------------------------------------------------
# Criterion 2: 3-link structure-function state table
# ---------------------------------------------------------------------------


def test_structure_function_table():
    for bits in range(8):
        x = [(bits >> j) & 1 for j in range(3)]
        assert structure_series(x) == (1 if bits == 7 else 0)


# ---------------------------------------------------------------------------
# Criterion 3: update-formula identities
# ---------------------------------------------------------------------------


def test_update_formula_identities():
    rng = random.Random(42)
    # Stacked shared-backup updates compose to 1 - prod(1 - a_i).
    for _ in range(10_000):
        p = rng.random()
        backups = [rng.random() for _ in range(rng.randint(1, 5))]
        stacked = p
        for b in backups:
            stacked = ava_dsbpss_update(stacked, b)
        closed = 1 - (1 - p) * math.prod(1 - b for b in backups)
        assert abs(stacked - closed) <= 1e-12
    # Cycle update satisfies a_pp_new * a_l == a_pp * a_pl.
    for _ in range(10_000):
        a_l = rng.uniform(1e-6, 1.0)
        a_pp = a_l * rng.random()
        a_bp = rng.random()
        a_pp_new, a_pl = ava_dcyc_update(a_pp, a_l, a_bp)
        assert abs(a_pp_new * a_l - a_pp * a_pl) <= 1e-12


# ---------------------------------------------------------------------------
# Criterion 4: threshold gating on the full-scale run
# ---------------------------------------------------------------------------


def test_threshold_gating_zero_protection(hundred_k_run):
    _, report, _ = hundred_k_run
    assert report.arrived > 0
    assert report.needing_protection == 0
    assert report.protection_slot_time == 0.0
    from eonprotect.metrics import restorability

    assert restorability(report) is None


# ---------------------------------------------------------------------------
# Criterion 5: exhaustive single-fault soundness after random prefixes
# ---------------------------------------------------------------------------


def _assert_protected_paths_restorable(sim):
    for conn in sim.live.values():
        result = conn.result
        if not result.protected:
            continue
        if result.backup_paths:
            wp_links = {l.id for l in result.path.links}
            for failed in wp_links:
                assert any(
                    failed not in bp.link_ids() for bp in result.backup_paths
                ), (conn.id, failed)
        if result.protected_links:
            for cid, lid in result.protected_links:
                cycle = sim.cycles.cycles[cid]
                assert lid in cycle.protected
                assert cycle.protected[lid][0] == conn.id


def test_single_fault_restorability_soundness():
    rng = random.Random(777)
    t0 = time.perf_counter()
    prefixes = 0
    for _ in range(50):
        avail, ath = rng.choice([(0.9, 0.99), (0.99, 0.999)])
        load = rng.choice([15, 20, 25])
        seed = rng.randint(0, 10**6)
        for mode in ("dsbpss", "dcycles"):
            sc = Scenario(
                load_erlang=load,
                a_th=ath,
                mode=mode,
                avg_link_availability=avail,
                n_requests=500,
                seed=seed,
                mean_holding_s=1.0,
            )
            sim = Simulation(sc)
            sim.run(max_arrivals=500)
            report = inject_single_failures(sim)
            assert report.conflicts == 0, (mode, seed)
            assert len(report.per_link) == 22
            _assert_protected_paths_restorable(sim)
            prefixes += 1
    assert prefixes == 100
    assert time.perf_counter() - t0 < 600


# ---------------------------------------------------------------------------
# Criterion 6: blocking-probability trends across loads and modes
# ---------------------------------------------------------------------------


def _mean_bp(mode, load, avail, ath, seeds, n=2000):
    values = []
    for seed in seeds:
        sc = Scenario(
            load_erlang=load,
            a_th=ath,
            mode=mode,
            avg_link_availability=avail,
            n_requests=n,
            seed=seed,
            mean_holding_s=1.0,
        )
        report = Simulation(sc).run()
        values.append(report.blocked / report.arrived)
    return values


def test_blocking_probability_trends():
    seeds = [1, 2, 3, 4, 5]
    loads = [15, 20, 25]
    # Operating points where protection is actually reachable and active.
    for mode, avail, ath in (("dsbpss", 0.9, 0.99), ("dcycles", 0.99, 0.999)):
        protected = {load: _mean_bp(mode, load, avail, ath, seeds) for load in loads}
        baseline = {load: _mean_bp("none", load, avail, ath, seeds) for load in loads}
        for series in (protected, baseline):
            for lo, hi in zip(loads, loads[1:]):
                m_lo, m_hi = statistics.mean(series[lo]), statistics.mean(series[hi])
                pooled = math.sqrt(
                    (statistics.pvariance(series[lo]) + statistics.pvariance(series[hi]))
                    / 2
                )
                assert m_hi >= m_lo - pooled, (mode, lo, hi, m_lo, m_hi, pooled)
        for load in loads:
            assert statistics.mean(protected[load]) > statistics.mean(
                baseline[load]
            ), (mode, load)


# ---------------------------------------------------------------------------
# Criterion 7: conservation and deterministic replay
# ---------------------------------------------------------------------------


def _strip_runtime(text):
    idx = CSV_COLUMNS.index("runtime_s")
    out = []
    for line in text.splitlines():
        parts = line.split(",")
        parts[idx] = ""
        out.append(",".join(parts))
    return "\n".join(out)


def test_conservation_and_deterministic_replay(tmp_path):
    for mode, avail, ath in (
        ("none", 0.999, 0.99),
        ("dsbpss", 0.9, 0.99),
        ("dcycles", 0.99, 0.999),
    ):
        sc = Scenario(
            load_erlang=20,
            a_th=ath,
            mode=mode,
            avg_link_availability=avail,
            n_requests=1500,
            seed=11,
            mean_holding_s=1.0,
        )
        sim = Simulation(sc)
        sim.run()
        assert sim.graph.busy_slot_count() == 0
        assert sum(l.bitmap.size for l in sim.graph.links.values()) == 22 * 320
        assert sim.registry.is_empty()
        assert sim.cycles.is_empty()
        assert not sim.live

    # Identical seed + config produce identical CSV bytes; only the wall-time
    # column may differ between the two executions.
    cell = dict(
        mode="dsbpss",
        load_erlang=20.0,
        avg_link_availability=0.9,
        a_th=0.99,
        n_requests=1500,
        seed=11,
        mean_holding_s=1.0,
    )
    paths = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        emit([run_cell(dict(cell))], "csv", str(out))
        paths.append(out)
    assert _strip_runtime(paths[0].read_text()) == _strip_runtime(paths[1].read_text())


# ---------------------------------------------------------------------------
# Criterion 8: full-scale performance
# ---------------------------------------------------------------------------


def test_hundred_k_run_performance(hundred_k_run):
    _, report, elapsed = hundred_k_run
    assert report.arrived > 0
    assert elapsed < 300, f"100k-request run took {elapsed:.1f} s"

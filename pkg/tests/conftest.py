import time

import pytest

from osmapinn import harness

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


class NetworkCache:
    """Trains each (scenario, seed) network once per session."""

    def __init__(self):
        self._nets = {}

    def get(self, scenario, seed):
        key = (scenario, seed)
        if key not in self._nets:
            cfg = harness.scenario(scenario, seed=seed)
            t0 = time.perf_counter()
            params, history = harness.train_network(cfg)
            self._nets[key] = (cfg, params, history, time.perf_counter() - t0)
        return self._nets[key]


@pytest.fixture(scope="session")
def networks():
    return NetworkCache()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        ok, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")

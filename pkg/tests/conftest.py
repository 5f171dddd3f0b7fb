import pytest

from matchsim.prefgen import Market


def reference_da(market, rng=None):
    """Straight Algorithm-style DA: repeatedly pick any free proposer with
    entries left and let him make one proposal. Returns a proposer->recipient
    dict. ``rng`` randomises which free proposer moves next."""
    n = market.n
    pointer = [0] * n
    holds = {}  # recipient -> proposer
    partner = {}  # proposer -> recipient
    while True:
        free = [p for p in range(n) if p not in partner and pointer[p] < len(market.proposer_prefs[p])]
        if not free:
            break
        p = rng.choice(free) if rng else free[0]
        r = market.proposer_prefs[p][pointer[p]]
        pointer[p] += 1
        rlist = market.recipient_prefs[r]
        if p not in rlist:
            continue
        cur = holds.get(r)
        if cur is None or rlist.index(p) < rlist.index(cur):
            holds[r] = p
            partner[p] = r
            if cur is not None:
                del partner[cur]
    return partner


@pytest.fixture
def two_by_two():
    # m1:[w1,w2], m2:[w2,w1]; w1:[m2,m1], w2:[m1,m2]
    return Market.from_lists([[0, 1], [1, 0]], [[1, 0], [0, 1]])


FIG2_CONFIG = dict(k_values=(10, 15, 20, 40), rho_values=(0.05, 1.0, 3.0), trials=50, master_seed=7)

# (criterion, passed, detail) lines reported at the end of the run.
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fig2_rows():
    """The Fig.-2 grid over the default n ladder, computed once per session."""
    import time

    from matchsim.sweep import SweepConfig, run_sweep

    start = time.perf_counter()
    rows = run_sweep(SweepConfig(**FIG2_CONFIG))
    return rows, time.perf_counter() - start


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda x: int(x[0].split()[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")

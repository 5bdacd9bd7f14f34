import numpy as np
import pytest

from pptdistill.operators import BipartiteOperator


def random_hermitian(rng, da, db, scale=1.0):
    n = da * db
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return BipartiteOperator(da, db, scale * (g + g.conj().T) / 2)


def random_matrix(rng, da, db):
    n = da * db
    return BipartiteOperator(da, db, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def basis_vector(n, k):
    v = np.zeros(n, dtype=complex)
    v[k] = 1.0
    return v


def pt_by_loops(mat, da, db):
    """Index-formula partial transpose, kept independent of the reshape version."""
    out = np.zeros_like(mat)
    for i in range(da):
        for j in range(db):
            for k in range(da):
                for l in range(db):
                    out[i * db + j, k * db + l] = mat[i * db + l, k * db + j]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

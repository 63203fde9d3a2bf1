import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from uqbethe.bethe import BetheTask
from uqbethe.gln_rep import eval_l, tensor_l, tensor_module, tensor_power, vector_rep
from uqbethe.qsym import Composition, make_assignment

# nonzero rationals of moderate height
fractions = st.builds(
    Fraction,
    st.integers(-60, 60).filter(lambda x: x != 0),
    st.integers(1, 60),
)
generic_q = fractions.filter(lambda x: x not in (1, -1))


class Rnd:
    def __init__(self, seed):
        self.rng = random.Random(seed)

    def __call__(self):
        return Fraction(self.rng.randint(1, 10**4), self.rng.randint(1, 10**4))

    def many(self, k):
        out = []
        while len(out) < k:
            x = self()
            if x not in out:
                out.append(x)
        return out

    def q(self):
        while True:
            x = self()
            if x != 1:
                return x

    def matrix(self, n, m=None):
        import numpy as np
        m = n if m is None else m
        return np.array([[Fraction(self.rng.randint(-9, 9), self.rng.randint(1, 9)) for _ in range(m)]
                         for _ in range(n)], dtype=object)


@pytest.fixture
def rnd():
    return Rnd(20260)


def evaluation_task(rnd, N, n, factors=1):
    q, z = rnd.q(), rnd()
    m = tensor_power(vector_rep(N, q), factors)
    comp = Composition(N, n)
    t = make_assignment(comp, rnd.many(comp.total))
    return BetheTask(comp, m, eval_l(m, z, "plus"), t, "evaluation", z)


def tensor_task(rnd, N, n, k, routes=("trace", "w", "w_hat")):
    q = rnd.q()
    zs = rnd.many(k)
    v = vector_rep(N, q)
    m, lp = v, eval_l(v, zs[0], "plus")
    for z in zs[1:]:
        m = tensor_module(m, v)
        lp = tensor_l(lp, eval_l(v, z, "plus"))
    comp = Composition(N, n)
    t = make_assignment(comp, rnd.many(comp.total))
    return BetheTask(comp, m, lp, t, "tensor", None, routes)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

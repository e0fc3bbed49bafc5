import time

import numpy as np
import pytest

from varsmooth import problems, solvers

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


class Instance:
    """A denoising instance together with a long PDHG reference."""

    def __init__(self, m, n, alpha, seed, ref_iters):
        start = time.perf_counter()
        spec = problems.ImageProblemSpec(m=m, n=n, alpha=alpha, noise_sigma=0.1, seed=seed)
        self.truth, self.data = problems.make_instance(spec)
        self.problem = problems.build_denoising(self.data, alpha)
        ref = solvers.run_pdhg(self.problem, iters=ref_iters, trace_every=10, timing=False)
        self.x_ref = ref.x_final
        self.f_star = float(np.min(ref.trace.column("objective")))
        self.f0 = self.problem.objective(self.data)
        self.build_seconds = time.perf_counter() - start

    def rel(self, objective):
        return (np.asarray(objective) - self.f_star) / (self.f0 - self.f_star)


@pytest.fixture(scope="session")
def denoise32():
    return Instance(32, 32, 40.0, seed=0, ref_iters=30_000)

import numpy as np

from anisotrap.tools.symplectic.params import TrapParams


def random_feasible_traps(n, rng, min_eps_sq=0.01):
    """ω∈[0.1,1), ν∈[0,0.9] 에서 ε² ≥ min_eps_sq 인 트랩을 뽑는다"""
    traps = []
    while len(traps) < n:
        omega = rng.uniform(0.1, 1.0)
        nu = rng.uniform(0.0, 0.9)
        if 1.0 - omega**2 - nu**2 >= min_eps_sq:
            traps.append(TrapParams.from_inputs(omega=omega, nu=nu, g=1.0))
    return traps


def relative_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


SMALL_SCENARIO = """\
name = "{name}"

[trap]
nu = 0.3
eps_sq = 0.3
g = 1.0

[solver]
degree = 16
n1 = 64
n2 = 64
half_width1 = 6.0
half_width2 = 6.0
max_iter = {max_iter}
seed = 3
restarts = 1

[output]
directory = "{directory}"
record_history = {record}
"""


def write_small_scenario(path, name="small", directory="runs", max_iter=3000, record=False):
    """ν=0.3, ε²=0.3 (중간 영역) 의 작은 시나리오 파일"""
    path.write_text(
        SMALL_SCENARIO.format(name=name, directory=directory, max_iter=max_iter, record=str(record).lower()),
        encoding="utf-8",
    )
    return str(path)

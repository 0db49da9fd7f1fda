"""Hypothesis-space size and sample-complexity bounds for metarule learners."""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MilParams:
    p: int
    m: int
    j: int
    n: int
    epsilon: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        if self.p < 1 or self.m < 1 or self.j < 1 or self.n < 0:
            raise ValueError("need p, m, j >= 1 and n >= 0")
        if not (0 < self.epsilon <= 1 and 0 < self.delta <= 1):
            raise ValueError("epsilon and delta must lie in (0, 1]")


def hypothesis_space_size(m: int, p: int, j: int, n: int) -> int:
    """Number of n-clause programs over p symbols and m metarules with j body literals."""
    MilParams(p, m, j, n)
    return (m * p ** (j + 1)) ** n


def sample_bound(params: MilParams) -> float:
    """Examples sufficient for error ``epsilon`` with confidence ``1 - delta``."""
    if params.n < 1:
        raise ValueError("sample bound needs n >= 1")
    n, m, p, j = params.n, params.m, params.p, params.j
    return (n * math.log(m) + (j + 1) * n * math.log(p) + math.log(1 / params.delta)) / params.epsilon


def playgol_improves(n: int, k: int, p: int, c: int) -> bool:
    """Whether adding ``c`` symbols that shrink the target by ``k`` clauses lowers the bound.

    Decided on logarithms when they are clearly apart, else on the exact
    integers ``p**n`` and ``(p + c)**(n - k)``.
    """
    if n < 1 or not 0 <= k <= n or p < 1 or c < 0:
        raise ValueError("need n >= 1, 0 <= k <= n, p >= 1, c >= 0")
    lhs = n * math.log(p)
    rhs = (n - k) * math.log(p + c)
    if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs), abs(rhs)):
        return lhs > rhs
    return p ** n > (p + c) ** (n - k)

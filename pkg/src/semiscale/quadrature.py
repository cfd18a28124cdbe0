"""Composite Simpson nodes/weights and the improper-integral truncation policy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# Smallest decay exponent lambda * s_max the tail cutoff is allowed to reach.
MIN_DECAY = 30.0


def simpson_rule(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Simpson with ``panels`` panels (2*panels+1 nodes)."""
    if panels < 1:
        raise DomainError("need at least one Simpson panel")
    nodes = np.linspace(a, b, 2 * panels + 1)
    w = np.ones_like(nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (b - a) / (6.0 * panels)
    return nodes, w


@dataclass(frozen=True)
class QuadratureSpec:
    """Panel count and absolute tolerance for the Laplace-type integrals.

    The tail of int_0^inf e^{-rate s} T(s)f ds is cut at
    ``s_max = ln(norm / (tol * rate)) / rate``, never below ``MIN_DECAY / rate``.
    """

    panels: int = 512
    tol: float = 1e-6

    def __post_init__(self):
        if int(self.panels) != self.panels or self.panels < 16:
            raise DomainError(f"QuadratureSpec needs panels >= 16, got {self.panels}")
        if not self.tol > 0:
            raise DomainError("QuadratureSpec needs tol > 0")

    def cutoff(self, norm: float, rate: float) -> float:
        if not rate > 0:
            raise DomainError("tail cutoff needs a positive decay rate")
        norm = max(float(norm), 1e-300)
        s = math.log(norm / (self.tol * rate)) / rate if norm > self.tol * rate else 0.0
        return max(s, MIN_DECAY / rate)

    def tail_bound(self, norm: float, rate: float) -> float:
        return float(norm) * math.exp(-rate * self.cutoff(norm, rate)) / rate

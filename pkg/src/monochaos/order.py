"""Vector order on R^n, strong-order witnesses, and sampled monotonicity falsification."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .expr import IntervalBox


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class VectorOrder:
    """x <= y iff x_j <= y_j for every coordinate j."""

    dimension: int

    def _check(self, x, y):
        if len(x) != self.dimension or len(y) != self.dimension:
            raise DimensionMismatch(
                f"order on R^{self.dimension} got points of length {len(x)} and {len(y)}"
            )

    def leq(self, x: Sequence[float], y: Sequence[float]) -> bool:
        self._check(x, y)
        return all(a <= b for a, b in zip(x, y))

    def strictly_less(self, x: Sequence[float], y: Sequence[float]) -> bool:
        self._check(x, y)
        return self.leq(x, y) and any(a != b for a, b in zip(x, y))


def leq(order: VectorOrder, x, y) -> bool:
    return order.leq(x, y)


def strictly_less(order: VectorOrder, x, y) -> bool:
    return order.strictly_less(x, y)


@dataclass(frozen=True)
class OrderWitness:
    """Open boxes U below and V above the point x, inside a neighbourhood of x."""

    U: IntervalBox
    V: IntervalBox
    x: tuple
    radius: float

    def check(self, order: VectorOrder) -> bool:
        """Every corner of U is strictly below x, x strictly below every corner of V,
        and both boxes are nonempty and inside the max-norm ball of the radius."""
        x = self.x
        for box in (self.U, self.V):
            if any(w <= 0 for w in box.widths):
                return False
            for c in box.corners():
                if max(abs(a - b) for a, b in zip(c, x)) >= self.radius:
                    return False
        return (all(order.strictly_less(c, x) for c in self.U.corners())
                and all(order.strictly_less(x, c) for c in self.V.corners()))


def strong_order_witness(order: VectorOrder, x: Sequence[float], radius: float) -> OrderWitness:
    """Boxes centred at x -/+ radius/2 along the diagonal, half-width radius/8.

    The neighbourhood is the max-norm ball, so the outermost corner sits at
    distance 5*radius/8 regardless of dimension.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    x = tuple(float(v) for v in x)
    if len(x) != order.dimension:
        raise DimensionMismatch(f"point of length {len(x)} for order on R^{order.dimension}")
    shift, half = radius / 2.0, radius / 8.0
    U = IntervalBox([(v - shift - half, v - shift + half) for v in x])
    V = IntervalBox([(v + shift - half, v + shift + half) for v in x])
    return OrderWitness(U, V, x, float(radius))


@dataclass(frozen=True)
class MonotoneCounterexample:
    x: tuple
    y: tuple
    Tx: tuple
    Ty: tuple
    coordinate: int
    sample: int

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "Tx": list(self.Tx), "Ty": list(self.Ty),
                "coordinate": self.coordinate, "sample": self.sample}


def falsify_monotone(
    mapping: Callable,
    order: VectorOrder,
    box: IntervalBox,
    samples: int,
    seed: int = 42,
    spread: float = 0.1,
    tol: float = 0.0,
) -> Optional[MonotoneCounterexample]:
    """Search for comparable x <= y in `box` with T(x) not <= T(y).

    y = x + u * (hi - x) with u uniform in [0, spread]^n, so y stays in the box.
    Returns the first violation found, or None.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    lo, hi = box.lo, box.hi
    n = box.dim
    for s in range(samples):
        x = rng.uniform(lo, hi)
        y = x + rng.uniform(0.0, spread, size=n) * (hi - x)
        xt, yt = tuple(float(v) for v in x), tuple(float(v) for v in y)
        Tx, Ty = tuple(mapping(xt)), tuple(mapping(yt))
        for j in range(n):
            if Tx[j] > Ty[j] + tol:
                return MonotoneCounterexample(xt, yt, Tx, Ty, j, s)
    return None

"""Closed real intervals with outward rounding, and interval evaluation of trees.

Every primitive operation whose floating result may be inexact widens the
affected endpoint by four ulps. Results that are provably exact (checked with
an error-free transform for sums and rational arithmetic for products and
quotients) are left alone, so zero lower bounds such as ``[0, 5] * 0.5`` stay
exactly zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .evaluate import ExprDomainError
from .nodes import BinOp, Call, Expr, Neg, Num, Param, Pow, Var

ULPS = 4
INF = math.inf


def _down(v: float, n: int = ULPS) -> float:
    if math.isinf(v) or math.isnan(v):
        return v
    for _ in range(n):
        v = math.nextafter(v, -INF)
    return v


def _up(v: float, n: int = ULPS) -> float:
    if math.isinf(v) or math.isnan(v):
        return v
    for _ in range(n):
        v = math.nextafter(v, INF)
    return v


def _sum_exact(a: float, b: float, s: float) -> bool:
    if not math.isfinite(s):
        return False
    bb = s - a
    return (a - (s - bb)) + (b - bb) == 0.0


def _mul_exact(a: float, b: float, p: float) -> bool:
    if a == 0.0 or b == 0.0:
        return p == 0.0
    if not (math.isfinite(p) and math.isfinite(a) and math.isfinite(b)):
        return False
    return Fraction(a) * Fraction(b) == Fraction(p)


def _div_exact(a: float, b: float, q: float) -> bool:
    if a == 0.0:
        return q == 0.0
    if not (math.isfinite(q) and math.isfinite(a) and math.isfinite(b)):
        return False
    return Fraction(a) / Fraction(b) == Fraction(q)


def _mul_bounds(a: float, b: float):
    """(lower, upper) enclosure of the real product a*b."""
    if (a == 0.0 and math.isinf(b)) or (b == 0.0 and math.isinf(a)):
        return 0.0, 0.0
    p = a * b
    if _mul_exact(a, b, p):
        return p, p
    return _down(p), _up(p)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> "Interval":
        v = float(v)
        return cls(v, v)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __add__(self, other: "Interval") -> "Interval":
        lo = self.lo + other.lo
        hi = self.hi + other.hi
        if not _sum_exact(self.lo, other.lo, lo):
            lo = _down(lo)
        if not _sum_exact(self.hi, other.hi, hi):
            hi = _up(hi)
        return Interval(lo, hi)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def __mul__(self, other: "Interval") -> "Interval":
        los, his = [], []
        for a in (self.lo, self.hi):
            for b in (other.lo, other.hi):
                lo, hi = _mul_bounds(a, b)
                los.append(lo)
                his.append(hi)
        return Interval(min(los), max(his))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo <= 0.0 <= other.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        los, his = [], []
        for a in (self.lo, self.hi):
            for b in (other.lo, other.hi):
                q = a / b
                if _div_exact(a, b, q):
                    los.append(q)
                    his.append(q)
                else:
                    los.append(_down(q))
                    his.append(_up(q))
        return Interval(min(los), max(his))

    def __pow__(self, k: int) -> "Interval":
        if k == 0:
            return Interval(1.0, 1.0)
        if k < 0:
            return Interval(1.0, 1.0) / (self ** (-k))
        # repeated products are sound but lose the even-power sign; fix that after
        r = self
        for _ in range(k - 1):
            r = r * self
        if k % 2 == 0:
            lo = max(r.lo, 0.0)
            if self.lo > 0.0 or self.hi < 0.0:
                m = min(abs(self.lo), abs(self.hi))
                lo = max(lo, _mul_chain_down(m, k))
            return Interval(lo, max(r.hi, lo))
        return r

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


def _mul_chain_down(m: float, k: int) -> float:
    v = m
    for _ in range(k - 1):
        v = _mul_bounds(v, m)[0]
    return max(v, 0.0)


def _exp(x: Interval) -> Interval:
    def e(v):
        try:
            return math.exp(v)
        except OverflowError:
            return INF
    lo = max(_down(e(x.lo)), 0.0)
    return Interval(lo, _up(e(x.hi)))


def _log(x: Interval, node) -> Interval:
    if x.hi <= 0.0:
        raise ExprDomainError("log of an interval with no positive values", node)
    lo = -INF if x.lo <= 0.0 else _down(math.log(x.lo))
    return Interval(lo, _up(math.log(x.hi)))


def _sqrt(x: Interval, node) -> Interval:
    if x.hi < 0.0:
        raise ExprDomainError("sqrt of a negative interval", node)
    lo = 0.0 if x.lo <= 0.0 else max(_down(math.sqrt(x.lo)), 0.0)
    return Interval(lo, _up(math.sqrt(x.hi)))


def _abs(x: Interval) -> Interval:
    if x.lo >= 0.0:
        return x
    if x.hi <= 0.0:
        return -x
    return Interval(0.0, max(-x.lo, x.hi))


def _contains_phase(x: Interval, phase: float) -> bool:
    """Whether x may contain phase + 2*pi*k for some integer k (errs toward yes)."""
    two_pi = 2.0 * math.pi
    slack = 1e-9 * (1.0 + abs(x.lo) + abs(x.hi))
    k_lo = math.ceil((x.lo - phase - slack) / two_pi)
    k_hi = math.floor((x.hi - phase + slack) / two_pi)
    return k_lo <= k_hi


def _trig(f, x: Interval, max_phase: float) -> Interval:
    if not (math.isfinite(x.lo) and math.isfinite(x.hi)) or x.width >= 2.0 * math.pi:
        return Interval(-1.0, 1.0)
    a, b = f(x.lo), f(x.hi)
    lo, hi = _down(min(a, b)), _up(max(a, b))
    if _contains_phase(x, max_phase):
        hi = 1.0
    if _contains_phase(x, max_phase + math.pi):
        lo = -1.0
    return Interval(max(lo, -1.0), min(hi, 1.0))


def _frac(x: Interval) -> Interval:
    if not (math.isfinite(x.lo) and math.isfinite(x.hi)):
        return Interval(0.0, 1.0)
    f = math.floor(x.lo)
    if math.floor(x.hi) == f and x.hi < f + 1:
        shift = Interval.point(-float(f))
        r = x + shift
        return Interval(max(r.lo, 0.0), min(r.hi, 1.0))
    return Interval(0.0, 1.0)


@dataclass(frozen=True)
class IntervalBox:
    intervals: tuple

    def __init__(self, intervals):
        ivs = []
        for iv in intervals:
            if not isinstance(iv, Interval):
                lo, hi = iv
                iv = Interval(float(lo), float(hi))
            ivs.append(iv)
        object.__setattr__(self, "intervals", tuple(ivs))

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "IntervalBox":
        return cls([(lo, hi)] * dim)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __getitem__(self, k) -> Interval:
        return self.intervals[k]

    @property
    def dim(self) -> int:
        return len(self.intervals)

    @property
    def lo(self) -> np.ndarray:
        return np.array([iv.lo for iv in self.intervals])

    @property
    def hi(self) -> np.ndarray:
        return np.array([iv.hi for iv in self.intervals])

    @property
    def widths(self) -> tuple:
        return tuple(iv.width for iv in self.intervals)

    def midpoint(self) -> tuple:
        return tuple(iv.mid for iv in self.intervals)

    def corners(self) -> list:
        pts = [()]
        for iv in self.intervals:
            pts = [p + (v,) for p in pts for v in (iv.lo, iv.hi)]
        return pts

    def contains(self, point, strict: bool = False) -> bool:
        if strict:
            return all(iv.lo < v < iv.hi for iv, v in zip(self.intervals, point))
        return all(iv.lo <= v <= iv.hi for iv, v in zip(self.intervals, point))

    def bisect(self, axis: int):
        iv = self.intervals[axis]
        m = iv.mid
        left = list(self.intervals)
        right = list(self.intervals)
        left[axis] = Interval(iv.lo, m)
        right[axis] = Interval(m, iv.hi)
        return IntervalBox(left), IntervalBox(right)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))

    def to_list(self) -> list:
        return [[iv.lo, iv.hi] for iv in self.intervals]

    def __repr__(self):
        return "IntervalBox(" + " x ".join(repr(iv) for iv in self.intervals) + ")"


def interval_eval(e: Expr, box: Sequence[Interval]) -> Interval:
    """Enclosure of {evaluate(e, x) : x in box}; sound, not necessarily tight."""
    if isinstance(e, Num):
        v = e.value
        fv = float(v)
        if isinstance(v, int) and int(fv) != v:
            return Interval(_down(fv, 1), _up(fv, 1))
        return Interval(fv, fv)
    if isinstance(e, Var):
        return box[e.index]
    if isinstance(e, Param):
        return Interval.point(e.value)
    if isinstance(e, Neg):
        return -interval_eval(e.operand, box)
    if isinstance(e, BinOp):
        a = interval_eval(e.left, box)
        b = interval_eval(e.right, box)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        try:
            return a / b
        except ZeroDivisionError:
            raise ExprDomainError("division by an interval containing zero", e) from None
    if isinstance(e, Pow):
        try:
            return interval_eval(e.base, box) ** e.exponent
        except ZeroDivisionError:
            raise ExprDomainError("negative power of an interval containing zero", e) from None
    if isinstance(e, Call):
        x = interval_eval(e.arg, box)
        if e.func == "exp":
            return _exp(x)
        if e.func == "log":
            return _log(x, e)
        if e.func == "sqrt":
            return _sqrt(x, e)
        if e.func == "abs":
            return _abs(x)
        if e.func == "sin":
            return _trig(math.sin, x, math.pi / 2)
        if e.func == "cos":
            return _trig(math.cos, x, 0.0)
        if e.func == "frac":
            return _frac(x)
    raise TypeError(f"not an expression node: {e!r}")

"""Eventually-linear functions ``Z>=0 -> Z>=0`` and the lattices W' and W.

A :class:`TailedFunction` stores a finite prefix ``v_0..v_H`` and a tail slope
``s`` in ``{0, 1}``; it takes the value ``v_H + s*(k - H)`` for ``k >= H``.
Every function this package manipulates (``rho_r``, the identity, duals,
inclinations, numerical perversities and their plus-shifts) has this shape,
and the shape is closed under all the operations below.

Text encoding is ``v0,v1,...,vH;+s``, e.g. ``0,1,2;+0`` for ``rho_2`` and
``0;+1`` for the identity.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .errors import InvariantViolation

_ENCODING = re.compile(r"^\s*(\d+(?:\s*,\s*\d+)*)\s*;\s*\+\s*([01])\s*$")


def _canonical(prefix: Sequence[int], slope: int) -> tuple[int, ...]:
    values = list(prefix)
    while len(values) > 1 and values[-1] - values[-2] == slope:
        values.pop()
    return tuple(values)


@dataclass(frozen=True)
class TailedFunction:
    """Exact eventually-linear function with tail slope 0 or 1.

    The prefix is trimmed from the right on construction, so two instances are
    equal exactly when they describe the same function.  Comparison operators
    implement the pointwise partial order (``f <= g`` iff ``f(k) <= g(k)`` for
    every ``k``); they are not a total order.
    """

    prefix: tuple[int, ...]
    slope: int

    def __post_init__(self):
        if self.slope not in (0, 1):
            raise InvariantViolation("encoding.slope", f"tail slope must be 0 or 1, got {self.slope}")
        prefix = tuple(int(v) for v in self.prefix)
        if not prefix:
            raise InvariantViolation("encoding.syntax", "prefix must be nonempty")
        if any(v < 0 for v in prefix):
            raise InvariantViolation("encoding.negative", f"values must be nonnegative: {prefix}")
        object.__setattr__(self, "prefix", _canonical(prefix, self.slope))

    # -- construction -----------------------------------------------------

    @classmethod
    def from_callable(cls, fn: Callable[[int], int], horizon: int, slope: int) -> "TailedFunction":
        """Sample ``fn`` on ``[0, horizon]``; the caller vouches that ``fn`` is
        linear with the given slope from ``horizon`` on."""
        return cls(tuple(fn(k) for k in range(horizon + 1)), slope)

    @classmethod
    def decode(cls, text: str) -> "TailedFunction":
        """Parse the text encoding, checking syntax only."""
        match = _ENCODING.match(text)
        if match is None:
            raise InvariantViolation("encoding.syntax", f"expected 'v0,v1,...,vH;+s', got {text!r}")
        prefix = tuple(int(v) for v in match.group(1).split(","))
        return cls(prefix, int(match.group(2)))

    @classmethod
    def parse(cls, text: str, *, canonical_only: bool = True) -> "TailedFunction":
        """Parse an element of W'.

        Rejects encodings that break a W' invariant and, when ``canonical_only``
        is set, encodings whose prefix is not already trimmed.
        """
        f = cls.decode(text)
        if canonical_only:
            raw = tuple(int(v) for v in _ENCODING.match(text).group(1).split(","))
            if raw != f.prefix:
                raise InvariantViolation(
                    "encoding.non-canonical",
                    f"prefix {raw} is not trimmed; canonical form is {f.encode()}",
                    text,
                )
        problem = wprime_violation(f)
        if problem is not None:
            raise problem
        return f

    def encode(self) -> str:
        return ",".join(map(str, self.prefix)) + f";+{self.slope}"

    def __str__(self) -> str:
        return self.encode()

    # -- evaluation -------------------------------------------------------

    @property
    def horizon(self) -> int:
        return len(self.prefix) - 1

    def __call__(self, k: int) -> int:
        if k < 0:
            raise ValueError(f"argument must be nonnegative, got {k}")
        h = len(self.prefix) - 1
        if k <= h:
            return self.prefix[k]
        return self.prefix[h] + self.slope * (k - h)

    def values(self, upto: int) -> list[int]:
        """Values on ``[0, upto]``."""
        return [self(k) for k in range(upto + 1)]

    def increments(self) -> tuple[int, ...]:
        p = self.prefix
        return tuple(p[i + 1] - p[i] for i in range(len(p) - 1))

    # -- pointwise partial order -----------------------------------------

    def le(self, other: "TailedFunction") -> bool:
        # past both horizons the difference is linear with slope s_f - s_g
        n = max(self.horizon, other.horizon)
        if any(self(k) > other(k) for k in range(n + 1)):
            return False
        return self.slope <= other.slope

    def __le__(self, other):
        if not isinstance(other, TailedFunction):
            return NotImplemented
        return self.le(other)

    def __ge__(self, other):
        if not isinstance(other, TailedFunction):
            return NotImplemented
        return other.le(self)

    def __lt__(self, other):
        if not isinstance(other, TailedFunction):
            return NotImplemented
        return self != other and self.le(other)

    def __gt__(self, other):
        if not isinstance(other, TailedFunction):
            return NotImplemented
        return self != other and other.le(self)


def identity() -> TailedFunction:
    return TailedFunction((0,), 1)


def zero() -> TailedFunction:
    return TailedFunction((0,), 0)


def rho_r(r: int) -> TailedFunction:
    """``k -> min(k, r)``, the classical Serre condition ``S_r``."""
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    return TailedFunction(tuple(range(r + 1)), 0)


# -- membership ----------------------------------------------------------


def wprime_violation(f: TailedFunction) -> InvariantViolation | None:
    """First W' invariant ``f`` breaks, or ``None``."""
    if f.prefix[0] != 0:
        return InvariantViolation("wprime.origin", f"value at 0 must be 0, got {f.prefix[0]}", f.encode())
    for k, step in enumerate(f.increments()):
        if step < 0:
            return InvariantViolation(
                "wprime.monotone", f"decreases between {k} and {k + 1}", f.encode()
            )
        if step > 1:
            return InvariantViolation(
                "wprime.slope", f"jumps by {step} between {k} and {k + 1}", f.encode()
            )
    return None


def in_Wprime(f: TailedFunction) -> bool:
    return wprime_violation(f) is None


def w_violation(f: TailedFunction) -> InvariantViolation | None:
    """First W invariant ``f`` breaks, or ``None``."""
    problem = wprime_violation(f)
    if problem is not None:
        return problem
    # monotone with unit steps: checking k = 1, 2 settles f >= rho_2
    if f(1) < 1 or f(2) < 2:
        return InvariantViolation("w.below-rho2", "must dominate min(k, 2)", f.encode())
    return None


def in_W(f: TailedFunction) -> bool:
    fast = w_violation(f) is None
    assert fast == (in_Wprime(f) and rho_r(2).le(f)), f"membership shortcut disagrees on {f}"
    return fast


def _require_w(f: TailedFunction) -> None:
    problem = w_violation(f)
    if problem is not None:
        raise problem


# -- lattice operations --------------------------------------------------


def _combine(f: TailedFunction, g: TailedFunction, pick: Callable[[int, int], int], take_steep: bool):
    n = max(f.horizon, g.horizon)
    if f.slope == g.slope:
        return TailedFunction.from_callable(lambda k: pick(f(k), g(k)), n, f.slope)
    steep, flat = (f, g) if f.slope == 1 else (g, f)
    # from here on the steep tail stays at or above the flat one
    cross = n + max(0, flat(n) - steep(n))
    return TailedFunction.from_callable(lambda k: pick(f(k), g(k)), cross, 1 if take_steep else 0)


def join(f: TailedFunction, g: TailedFunction) -> TailedFunction:
    """Pointwise maximum."""
    return _combine(f, g, max, take_steep=True)


def meet(f: TailedFunction, g: TailedFunction) -> TailedFunction:
    """Pointwise minimum."""
    return _combine(f, g, min, take_steep=False)


def dual(rho: TailedFunction) -> TailedFunction:
    """The dual condition: ``k`` for ``k <= 1`` and ``k - rho(k) + 2`` after.

    Agrees with conjugating numerical duality by ``phi``; see
    :func:`gserre.perversity_calculus.dual_by_conjugation`.
    """
    _require_w(rho)
    return TailedFunction.from_callable(
        lambda k: k if k <= 1 else k - rho(k) + 2, max(rho.horizon, 2), 1 - rho.slope
    )


def inclination(rho: TailedFunction, n: int) -> TailedFunction:
    """Largest element of W agreeing with ``rho`` on ``[0, n]``."""
    _require_w(rho)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return TailedFunction(tuple(rho(k) for k in range(n + 1)), 1)


# -- enumeration ---------------------------------------------------------


@lru_cache(maxsize=None)
def _wprime_upto(horizon: int) -> tuple[TailedFunction, ...]:
    out = []
    for h in range(horizon + 1):
        for steps in itertools.product((0, 1), repeat=h):
            for slope in (0, 1):
                if h and steps[-1] == slope:
                    continue
                out.append(TailedFunction(tuple(itertools.accumulate(steps, initial=0)), slope))
    out.sort(key=lambda f: (f.increments(), f.slope))
    return tuple(out)


def enumerate_wprime(horizon: int) -> Iterator[TailedFunction]:
    """Every element of W' whose canonical prefix has horizon ``<= horizon``.

    There are exactly ``2**(horizon + 1)`` of them; the order is lexicographic
    on increment sequences, then tail slope.
    """
    return iter(_wprime_upto(horizon))


def enumerate_w(horizon: int) -> Iterator[TailedFunction]:
    return (f for f in _wprime_upto(horizon) if w_violation(f) is None)

"""Standard numerical perversities, the plus-shift, and the ``S_rho``-perversity.

A numerical perversity ``pi`` has ``pi(0) = 0`` with both ``pi`` and
``id - pi`` nondecreasing; it has level ``n`` when additionally
``0 < pi(n) < n``.  ``P_n(rho)`` collects the level-``n`` perversities whose
plus-shift is bounded by ``rho`` and equals it from ``n`` on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation
from .rho_calculus import (
    TailedFunction,
    _require_w,
    enumerate_wprime,
    w_violation,
    wprime_violation,
)


@dataclass(frozen=True)
class NumericalPerversity:
    func: TailedFunction

    def __post_init__(self):
        problem = wprime_violation(self.func)
        if problem is not None:
            raise InvariantViolation("perversity.shape", str(problem), self.func.encode())

    @classmethod
    def from_values(cls, prefix, slope: int) -> "NumericalPerversity":
        return cls(TailedFunction(tuple(prefix), slope))

    @classmethod
    def parse(cls, text: str, *, canonical_only: bool = True) -> "NumericalPerversity":
        return cls(TailedFunction.parse(text, canonical_only=canonical_only))

    def __call__(self, k: int) -> int:
        return self.func(k)

    @property
    def horizon(self) -> int:
        return self.func.horizon

    def encode(self) -> str:
        return self.func.encode()

    def __str__(self) -> str:
        return self.func.encode()

    def le(self, other: "NumericalPerversity") -> bool:
        return self.func.le(other.func)


def _as_func(p) -> TailedFunction:
    return p.func if isinstance(p, NumericalPerversity) else p


def in_Pn(pi: NumericalPerversity, n: int) -> bool:
    if n < 2:
        raise ValueError(f"level must be at least 2, got {n}")
    f = _as_func(pi)
    return wprime_violation(f) is None and 0 < f(n) < n


def numerical_dual(pi: NumericalPerversity) -> NumericalPerversity:
    """``id - pi``."""
    f = _as_func(pi)
    return NumericalPerversity(TailedFunction.from_callable(lambda k: k - f(k), f.horizon, 1 - f.slope))


def pi_plus(pi: NumericalPerversity, n: int) -> NumericalPerversity:
    """Bump ``pi(k)`` by one wherever ``k - pi(k) >= n - pi(n)``.

    ``k - pi(k)`` is nondecreasing, so the bumped set is upward closed and
    contains every ``k >= n``.
    """
    f = _as_func(pi)
    threshold = n - f(n)
    return NumericalPerversity(
        TailedFunction.from_callable(
            lambda k: f(k) + 1 if k - f(k) >= threshold else f(k), max(f.horizon, n), f.slope
        )
    )


def in_Pn_rho(pi: NumericalPerversity, rho: TailedFunction, n: int) -> bool:
    """``pi`` in ``P_n`` with ``pi+ <= rho`` everywhere and ``pi+ = rho`` from ``n`` on."""
    if not in_Pn(pi, n):
        return False
    f = _as_func(pi)
    # the shift always bumps at n, so equality there pins pi(n)
    if f(n) + 1 != rho(n):
        return False
    plus = pi_plus(pi, n).func
    if not plus.le(rho):
        return False
    top = max(plus.horizon, rho.horizon, n)
    return plus.slope == rho.slope and all(plus(k) == rho(k) for k in range(n, top + 1))


def pi_min(rho: TailedFunction, n: int) -> NumericalPerversity:
    """Least element of ``P_n(rho)``."""
    _require_w(rho)
    if n < 2:
        raise ValueError(f"level must be at least 2, got {n}")
    shift = n - rho(n) + 1
    return NumericalPerversity(
        TailedFunction.from_callable(
            lambda k: max(k - shift, 0) if k < n else rho(k) - 1, max(n, rho.horizon), rho.slope
        )
    )


def last_below(rho: TailedFunction, n: int) -> int:
    """Largest ``m`` with ``rho(m) < rho(n)``."""
    target = rho(n)
    return next(m for m in range(n - 1, -1, -1) if rho(m) < target)


def pi_max(rho: TailedFunction, n: int) -> NumericalPerversity:
    """Greatest element of ``P_n(rho)``."""
    _require_w(rho)
    if n < 2:
        raise ValueError(f"level must be at least 2, got {n}")
    m = last_below(rho, n)
    return NumericalPerversity(
        TailedFunction.from_callable(
            lambda k: rho(k) if k <= m else rho(k) - 1, max(n, rho.horizon), rho.slope
        )
    )


def enumerate_Pn_rho(rho: TailedFunction, n: int, horizon: int) -> list[NumericalPerversity]:
    """Brute force: every numerical perversity of prefix horizon at most
    ``max(horizon, rho.horizon)`` lying in ``P_n(rho)``.

    Membership pins ``pi(k) = rho(k) - 1`` for ``k >= n``, so once the horizon
    reaches both ``n`` and ``rho``'s own horizon the list is all of ``P_n(rho)``.
    Works for any ``rho`` (the result is empty off W).
    """
    if horizon < n:
        raise ValueError(f"horizon {horizon} must be at least the level {n}")
    out = []
    for f in enumerate_wprime(max(horizon, rho.horizon)):
        pi = NumericalPerversity(f)
        if in_Pn_rho(pi, rho, n):
            out.append(pi)
    return out


def exists_pi_plus_eq_rho(rho: TailedFunction, n: int) -> bool:
    """Whether some ``pi`` in ``P_n(rho)`` has ``pi+ = rho`` exactly."""
    _require_w(rho)
    return rho(n - 1) < rho(n)


def phi(pi: NumericalPerversity) -> TailedFunction:
    """``P_2 -> W``: ``k`` for ``k <= 1`` and ``pi(k) + 1`` after."""
    if not in_Pn(pi, 2):
        raise InvariantViolation("perversity.level", "phi is defined on level-2 perversities only", str(pi))
    f = _as_func(pi)
    return TailedFunction.from_callable(lambda k: k if k <= 1 else f(k) + 1, max(f.horizon, 2), f.slope)


def phi_inverse(rho: TailedFunction) -> tuple[NumericalPerversity, NumericalPerversity]:
    """The two-element fibre ``(pi_min(rho, 2), pi_max(rho, 2))``."""
    low, high = pi_min(rho, 2), pi_max(rho, 2)
    assert phi(low) == rho and phi(high) == rho, f"fibre of {rho} does not map back"
    return low, high


def dual_by_conjugation(rho: TailedFunction) -> TailedFunction:
    """Dual on W obtained as ``phi(id - pi)`` for ``pi`` in the fibre of ``rho``.

    Either fibre element gives the same answer; the minimum is used.
    """
    problem = w_violation(rho)
    if problem is not None:
        raise problem
    return phi(numerical_dual(phi_inverse(rho)[0]))


def p_rho_criterion(codim: int, rho: TailedFunction, n: int) -> int:
    """Depth a sheaf needs at a point of codimension ``codim`` to lie in
    ``p_rho+ D>=0`` when the closed complement has c-codimension ``n``."""
    _require_w(rho)
    if n < 2:
        raise ValueError(f"c-codimension must be at least 2, got {n}")
    if codim >= n:
        return rho(codim)
    if codim >= n - rho(n) + 1:
        return rho(n) - (n - codim)
    return 0


def p_rho_plus_definitional(codim: int, rho: TailedFunction, n: int) -> int:
    """Same bound computed as ``pi_plus(pi_min(rho, n), n)(codim)``."""
    return pi_plus(pi_min(rho, n), n)(codim)

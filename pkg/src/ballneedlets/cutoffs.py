"""Admissible C-infinity cutoff functions and dual cutoff pairs.

The canonical cutoffs are built from ``h(t) = exp(-c/t)`` through the
smooth step ``s(t) = h(t) / (h(t) + h(1 - t))``.  Type (b) uses ``c = 1``;
type (a) uses the gentler ``c = 2``, whose kernels reach their asymptotic
decay at lower degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TYPE_A = "type_a"
TYPE_B = "type_b"

FLOOR_INTERVAL = (3 / 5, 5 / 3)

STEEPNESS_A = 2.0
STEEPNESS_B = 1.0


def _h(t, c=1.0):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-c / t[pos])
    return out


def smooth_step(t, c=1.0):
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    a, b = _h(t, c), _h(1.0 - t, c)
    return a / (a + b)


def _complement_step(t, c=1.0):
    # 1 - s(t), evaluated without cancellation
    t = np.asarray(t, dtype=float)
    a, b = _h(t, c), _h(1.0 - t, c)
    return b / (a + b)


def _type_a(t):
    return _complement_step(np.asarray(t, dtype=float) - 1.0, STEEPNESS_A)


def _type_b_squared(t):
    t = np.asarray(t, dtype=float)
    # s(2t-1) on [1/2, 1], 1 - s(t-1) on [1, 2], zero elsewhere
    return np.where(t <= 1.0, smooth_step(2.0 * t - 1.0, STEEPNESS_B), _complement_step(t - 1.0, STEEPNESS_B))


def _type_b(t):
    t = np.asarray(t, dtype=float)
    return np.where((t > 0.5) & (t < 2.0), np.sqrt(np.clip(_type_b_squared(t), 0.0, None)), 0.0)


def _bump(t):
    # exp(-1 / ((t - 1/2)(2 - t))) scaled to peak value 1 at t = 5/4
    t = np.asarray(t, dtype=float)
    inside = (t > 0.5) & (t < 2.0)
    out = np.zeros_like(t)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / ((ti - 0.5) * (2.0 - ti)) + 1.0 / (0.75 * 0.75))
    return out


def _bump_complex(t):
    t = np.asarray(t, dtype=float)
    return _bump(t) * np.exp(1j * np.pi * (t - 1.0))


@dataclass(frozen=True)
class Cutoff:
    """A real or complex cutoff ``a_hat`` on ``[0, inf)``.

    ``floor`` is the measured ``min |a_hat|`` over ``[3/5, 5/3]``.
    """

    kind: str
    name: str
    evaluator: Callable = field(repr=False, compare=False)
    floor: float = field(default=float("nan"), compare=False)

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, 2.0) if self.kind == TYPE_A else (0.5, 2.0)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.evaluator(np.array([1.0])))

    def __call__(self, t):
        return eval_cutoff(self, t)


def eval_cutoff(c: Cutoff, t):
    """Evaluate ``c`` at ``t >= 0``; exactly zero off the support and exactly one on a type (a) plateau."""
    t = np.asarray(t, dtype=float)
    vals = np.asarray(c.evaluator(t))
    lo, hi = c.support
    vals = np.where((t <= lo) & (lo > 0) | (t >= hi), 0.0, vals)
    if c.kind == TYPE_A:
        vals = np.where(t <= 1.0, 1.0, vals)
    return vals if vals.ndim else vals[()]


def measure_floor(evaluator, n: int = 20001) -> float:
    t = np.linspace(*FLOOR_INTERVAL, n)
    return float(np.min(np.abs(evaluator(t))))


def make_bump_cutoff(kind: str = TYPE_B) -> Cutoff:
    """Canonical cutoff of type (a) or (b).

    The type (b) cutoff satisfies ``a(t)^2 + a(2t)^2 = 1`` on ``[1/2, 1]``.
    """
    if kind == TYPE_A:
        ev = _type_a
    elif kind == TYPE_B:
        ev = _type_b
        probe = np.linspace(0.5, 2.0, 10001)
        if np.min(_type_b_squared(probe)) < 0:  # pragma: no cover - guarded by construction
            raise ArithmeticError("negative radicand in type (b) cutoff")
    else:
        raise ValueError(f"unknown cutoff kind {kind!r}")
    c = Cutoff(kind=kind, name=f"canonical_{kind}", evaluator=ev)
    return Cutoff(kind=kind, name=c.name, evaluator=ev, floor=measure_floor(lambda t: eval_cutoff(c, t)))


@dataclass(frozen=True)
class CutoffPair:
    """Analysis/synthesis cutoffs with ``conj(a) b`` summing to one over dyadic dilations."""

    a_hat: Cutoff
    b_hat: Cutoff
    name: str = "self-dual"

    @property
    def self_dual(self) -> bool:
        return self.a_hat is self.b_hat

    @property
    def is_real(self) -> bool:
        return self.a_hat.is_real and self.b_hat.is_real

    def product(self, t):
        """``conj(a_hat(t)) * b_hat(t)``."""
        return np.conj(eval_cutoff(self.a_hat, t)) * eval_cutoff(self.b_hat, t)

    def params(self) -> dict:
        return {"name": self.name, "a_hat": self.a_hat.name, "b_hat": self.b_hat.name}


def make_pair_self_dual() -> CutoffPair:
    a = make_bump_cutoff(TYPE_B)
    return CutoffPair(a_hat=a, b_hat=a, name="self-dual")


def _dilation_energy(a_eval, t):
    # sum over nu in Z of |a(2^nu t)|^2; supp a in [1/2, 2] leaves at most three terms
    t = np.asarray(t, dtype=float)
    return sum(np.abs(a_eval(t * 2.0**k)) ** 2 for k in (-2, -1, 0, 1, 2))


def make_pair_dual(a_hat: Cutoff, name: str | None = None) -> CutoffPair:
    """Pair ``a_hat`` with ``b_hat = a_hat / sum_nu |a_hat(2^nu t)|^2``."""
    if a_hat.kind != TYPE_B:
        raise ValueError("dual pairs need a type (b) cutoff")

    def a_eval(t):
        return eval_cutoff(a_hat, t)

    def b_eval(t):
        t = np.asarray(t, dtype=float)
        energy = _dilation_energy(a_eval, t)
        vals = a_eval(t)
        # energy >= |a|^2, so the quotient is finite wherever a is not negligibly small
        with np.errstate(over="ignore", invalid="ignore"):
            out = vals / np.where(energy > 0, energy, 1.0)
        return np.where((energy > 0) & np.isfinite(out), out, 0.0)

    b0 = Cutoff(kind=TYPE_B, name=f"dual_of_{a_hat.name}", evaluator=b_eval)
    b = Cutoff(kind=TYPE_B, name=b0.name, evaluator=b_eval, floor=measure_floor(lambda t: eval_cutoff(b0, t)))
    return CutoffPair(a_hat=a_hat, b_hat=b, name=name or f"pair:{a_hat.name}")


def _named_cutoff(name: str) -> Cutoff:
    table = {"bump": _bump, "complex": _bump_complex, "canonical": _type_b}
    if name not in table:
        raise ValueError(f"unknown cutoff pair {name!r}; choose from {sorted(table)}")
    ev = table[name]
    c = Cutoff(kind=TYPE_B, name=name, evaluator=ev)
    return Cutoff(kind=TYPE_B, name=name, evaluator=ev, floor=measure_floor(lambda t: eval_cutoff(c, t)))


def make_pair(spec: str = "self-dual") -> CutoffPair:
    """Build a pair from a CLI-style spec: ``self-dual`` or ``pair:<bump|complex|canonical>``."""
    if spec == "self-dual":
        return make_pair_self_dual()
    if spec.startswith("pair:"):
        name = spec.split(":", 1)[1]
        return make_pair_dual(_named_cutoff(name), name=spec)
    raise ValueError(f"unrecognised cutoff spec {spec!r}")


def partition_of_unity_error(pair: CutoffPair, t) -> np.ndarray:
    """``|sum_{nu >= 0} conj(a(2^-nu t)) b(2^-nu t) - 1|`` for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise ValueError("the dyadic partition of unity holds for t >= 1")
    total = np.zeros(t.shape, dtype=complex)
    nu_max = int(np.ceil(np.log2(np.max(t)))) + 2
    for nu in range(nu_max + 1):
        total += pair.product(t * 2.0**-nu)
    return np.abs(total - 1.0)

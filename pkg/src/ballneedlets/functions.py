"""Named test-function families, addressed by ``family:params`` descriptors.

Examples: ``constant``, ``boundary_power:alpha=1.5``, ``gaussian_bump:center=0.3;0,width=0.2``,
``random_bandlimited:seed=7,degree=8``.  A bare value after the colon fills the first parameter,
so ``boundary_power:0.75`` also works.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import WeightedBall, ball_distance
from .orthopoly import ball_basis, basis_size


class UnknownFamilyError(ValueError):
    """The descriptor names no known family or carries bad parameters."""


@dataclass
class TestFunction:
    """A callable on ``(npts, d)`` point arrays with its descriptor.

    ``degree`` is the polynomial degree for band-limited families and ``None`` otherwise;
    ``coeffs`` holds orthonormal-basis coefficients when they are known exactly.
    """

    __test__ = False  # keep pytest from collecting this class

    family: str
    params: dict
    func: object
    degree: int | None = None
    coeffs: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, x):
        return self.func(np.atleast_2d(np.asarray(x, dtype=float)))

    @property
    def descriptor(self) -> str:
        if not self.params:
            return self.family
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.family}:{body}"


def _fmt(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(repr(float(t)) for t in v)
    return repr(v)


_ORDER = {
    "constant": ["value"],
    "boundary_power": ["alpha"],
    "gaussian_bump": ["width", "center"],
    "random_bandlimited": ["seed", "degree"],
}


def parse_descriptor(text: str) -> tuple[str, dict]:
    family, _, rest = text.strip().partition(":")
    if family not in _ORDER:
        raise UnknownFamilyError(f"unknown function family {family!r}; choose from {sorted(_ORDER)}")
    params = {}
    for i, item in enumerate(t for t in rest.split(",") if t.strip()):
        key, eq, val = item.partition("=")
        if not eq:
            if i >= len(_ORDER[family]):
                raise UnknownFamilyError(f"too many positional parameters for {family}")
            key, val = _ORDER[family][i], item
        key = key.strip()
        if key not in _ORDER[family]:
            raise UnknownFamilyError(f"{family} takes parameters {_ORDER[family]}, got {key!r}")
        vals = [float(v) for v in val.split(";")]
        params[key] = vals if key == "center" else vals[0]
    return family, params


def make_function(descriptor: str, ball: WeightedBall) -> TestFunction:
    """Instantiate a test function on ``ball`` from its descriptor."""
    family, params = parse_descriptor(descriptor)
    d = ball.d
    if family == "constant":
        value = params.setdefault("value", 1.0)
        coeffs = np.array([value / np.sqrt(ball.total_mass)])
        return TestFunction(family, params, lambda x: np.full(x.shape[0], value), degree=0, coeffs=coeffs)
    if family == "boundary_power":
        alpha = params.setdefault("alpha", 1.5)
        return TestFunction(family, params, lambda x: np.clip(1.0 - np.sum(x * x, axis=1), 0.0, None) ** alpha)
    if family == "gaussian_bump":
        width = params.setdefault("width", 0.25)
        center = np.asarray(params.setdefault("center", [0.0] * d), dtype=float)
        if center.shape != (d,) or np.linalg.norm(center) > 1:
            raise UnknownFamilyError("gaussian_bump center must be a point of the ball")
        return TestFunction(family, params, lambda x: np.exp(-((ball_distance(x, center) / width) ** 2)))
    seed = params["seed"] = int(params.get("seed", 0))
    degree = params["degree"] = int(params.get("degree", 8))
    coeffs = random_coefficients(d, degree, np.random.default_rng(seed))
    return TestFunction(family, params, lambda x: ball_basis(ball, degree, x) @ coeffs, degree=degree, coeffs=coeffs)


def random_coefficients(d: int, degree: int, rng: np.random.Generator) -> np.ndarray:
    """Standard normal coefficients for the orthonormal basis of ``Pi_degree``."""
    return rng.standard_normal(basis_size(d, degree))


def random_polynomial(ball: WeightedBall, degree: int, rng: np.random.Generator) -> TestFunction:
    coeffs = random_coefficients(ball.d, degree, rng)
    return TestFunction("random_bandlimited", {"degree": degree}, lambda x: ball_basis(ball, degree, x) @ coeffs,
                        degree=degree, coeffs=coeffs)

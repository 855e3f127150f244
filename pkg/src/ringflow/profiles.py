"""Initial-density profiles with exact per-cell averages.

The finite-volume projection of an initial datum is its sequence of cell
averages.  Every built-in profile computes those averages from a closed-form
antiderivative (error function for Gaussians, sine differences for the cosine
bump), so the projection introduces no quadrature noise.  ``FromFunction`` is
the generic fallback and uses midpoint values instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf


@dataclass(frozen=True)
class Constant:
    """Spatially constant profile."""

    value: float

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, float(self.value))

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        return np.full(len(edges) - 1, float(self.value))


@dataclass(frozen=True)
class Gaussian:
    """amplitude * exp(-rate * (x - center)^2), averaged exactly via erf."""

    amplitude: float
    center: float
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("Gaussian rate must be positive")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(-self.rate * (x - self.center) ** 2)

    def _antiderivative(self, x: np.ndarray) -> np.ndarray:
        s = math.sqrt(self.rate)
        return 0.5 * self.amplitude * math.sqrt(math.pi / self.rate) * erf(s * (x - self.center))

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        prim = self._antiderivative(np.asarray(edges, dtype=float))
        return np.diff(prim) / np.diff(edges)


@dataclass(frozen=True)
class CosineBump:
    """scale * [cos(freq1*u) - cos(freq2*u)] on ``support``, zero outside,
    with u = stretch*x + shift.  Partial cells at the support cuts are
    integrated exactly."""

    scale: float
    freq1: float
    freq2: float
    stretch: float
    shift: float
    support: tuple[float, float]

    def __post_init__(self):
        if self.stretch == 0 or self.freq1 == 0 or self.freq2 == 0:
            raise ValueError("CosineBump frequencies and stretch must be nonzero")
        if not self.support[0] < self.support[1]:
            raise ValueError("CosineBump support must be a nonempty interval")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        u = self.stretch * x + self.shift
        inside = (x >= self.support[0]) & (x <= self.support[1])
        vals = self.scale * (np.cos(self.freq1 * u) - np.cos(self.freq2 * u))
        return np.where(inside, vals, 0.0)

    def _antiderivative(self, x: np.ndarray) -> np.ndarray:
        u = self.stretch * x + self.shift
        return self.scale * (
            np.sin(self.freq1 * u) / (self.freq1 * self.stretch)
            - np.sin(self.freq2 * u) / (self.freq2 * self.stretch)
        )

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        edges = np.asarray(edges, dtype=float)
        lo = np.clip(edges[:-1], *self.support)
        hi = np.clip(edges[1:], *self.support)
        return (self._antiderivative(hi) - self._antiderivative(lo)) / np.diff(edges)


@dataclass(frozen=True)
class Scaled:
    """factor * base."""

    factor: float
    base: "Profile"

    def evaluate(self, x):
        return self.factor * self.base.evaluate(x)

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        return self.factor * self.base.cell_averages(edges)


@dataclass(frozen=True)
class Summed:
    """Pointwise sum of profiles."""

    terms: tuple["Profile", ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("Summed needs at least one term")

    def evaluate(self, x):
        out = self.terms[0].evaluate(x)
        for term in self.terms[1:]:
            out = out + term.evaluate(x)
        return out

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        out = self.terms[0].cell_averages(edges)
        for term in self.terms[1:]:
            out = out + term.cell_averages(edges)
        return out


@dataclass(frozen=True)
class SplitShare:
    """One share of ``base`` split by a fraction field in [0, 1].

    ``share="fraction"`` carries fraction*base, ``share="complement"`` the
    rest.  The two shares are computed as a multiply/subtract pair arranged so
    that (Sterbenz) the subtraction is exact and the shares sum back to the
    base cell averages bit-for-bit.  Exactness of the averages additionally
    needs one of base/fraction to be spatially constant; mixed products of two
    varying profiles have no closed-form cell average here.
    """

    base: "Profile"
    fraction: "Profile"
    share: str

    def __post_init__(self):
        if self.share not in ("fraction", "complement"):
            raise ValueError("share must be 'fraction' or 'complement'")
        if not (isinstance(self.base, Constant) or isinstance(self.fraction, Constant)):
            raise ValueError("SplitShare needs a constant base or a constant fraction")

    def evaluate(self, x):
        m = self.fraction.evaluate(x)
        if self.share == "complement":
            m = 1.0 - m
        return m * self.base.evaluate(x)

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        b = self.base.cell_averages(edges)
        m = self.fraction.cell_averages(edges)
        # Large share by multiplication (factor >= 1/2 keeps the product in
        # [b/2, b]), small share by subtraction, which is then exact.
        frac_part = np.where(m > 0.5, m * b, b - (1.0 - m) * b)
        comp_part = np.where(m > 0.5, b - m * b, (1.0 - m) * b)
        return frac_part if self.share == "fraction" else comp_part


@dataclass(frozen=True, eq=True)
class Samples:
    """Explicit cell averages; must match the target grid exactly."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        if len(self.values) != len(edges) - 1:
            raise ValueError(
                f"Samples profile has {len(self.values)} cells, grid has {len(edges) - 1}"
            )
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True, eq=False)
class FromFunction:
    """Arbitrary callable, projected by midpoint values (approximate)."""

    fn: Callable[[np.ndarray], np.ndarray]

    def evaluate(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        edges = np.asarray(edges, dtype=float)
        mid = 0.5 * (edges[:-1] + edges[1:])
        return self.evaluate(mid)


Profile = (
    Constant | Gaussian | CosineBump | Scaled | Summed | SplitShare | Samples | FromFunction
)

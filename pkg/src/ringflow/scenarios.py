"""Named scenario presets for the standard two-class experiments.

All presets live on the periodic ring [0, 2] with dx = 5e-3 and horizon
T = 30 unless overridden.  Class densities are relative (maximal density 1)
and, except where a preset says otherwise, each class carries the steep
exponential saturation f(rho) = 1 - exp(50 (rho - 1)).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import PenetrationOutOfRange
from .model import (
    Boundary,
    ClassSpec,
    ConstantKernel,
    Coupling,
    ExponentialSaturation,
    Greenshields,
    InitialData,
    LinearDecreasingKernel,
    ModelSpec,
    NoSaturation,
    Scenario,
    Triangular,
)
from .profiles import Constant, CosineBump, Gaussian, Scaled, SplitShare, Summed

GAUSS_AMPLITUDE = 8.0 / 9.0
GAUSS_RATE = 100.0
SATURATION_STEEPNESS = 50.0
DOMAIN = (0.0, 2.0)
DX_DEFAULT = 5e-3
T_DEFAULT = 30.0


def _exp_sat() -> ExponentialSaturation:
    return ExponentialSaturation(steepness=SATURATION_STEEPNESS, r_max=1.0)


def _hump(center: float) -> Gaussian:
    return Gaussian(amplitude=GAUSS_AMPLITUDE, center=center, rate=GAUSS_RATE)


def preset_overtaking(
    with_saturation: bool = True,
    dx: float = DX_DEFAULT,
    T: float = T_DEFAULT,
    cfl_safety: float = 0.9,
) -> Scenario:
    """Fast class starting behind a slow class on the ring; both delayed by
    2.5.  With saturation every class stays below density 1; without it the
    fast class overshoots."""
    saturation = _exp_sat() if with_saturation else NoSaturation()
    classes = (
        ClassSpec(
            name="fast",
            r_max=1.0,
            speed=Greenshields(v_max=0.04, r_max=1.0),
            saturation=saturation,
            kernel=ConstantKernel(length=0.1),
            tau=2.5,
        ),
        ClassSpec(
            name="slow",
            r_max=1.0,
            speed=Greenshields(v_max=0.015, r_max=1.0),
            saturation=saturation,
            kernel=ConstantKernel(length=0.1),
            tau=2.5,
        ),
    )
    model = ModelSpec(
        classes=classes,
        coupling=Coupling.PER_CLASS,
        boundary=Boundary.PERIODIC,
        x_min=DOMAIN[0],
        x_max=DOMAIN[1],
    )
    initial = InitialData(profiles=(_hump(0.25), _hump(0.9)))
    suffix = "" if with_saturation else "-nosat"
    return Scenario(
        name=f"overtaking{suffix}", model=model, initial=initial, T=T, dx=dx,
        cfl_safety=cfl_safety,
    )


def preset_invariant_domain(
    coupling: Coupling = Coupling.TOTAL_DENSITY,
    dx: float = DX_DEFAULT,
    T: float = T_DEFAULT,
    cfl_safety: float = 0.9,
) -> Scenario:
    """Overtaking data under either coupling.  Saturating on the total
    density keeps the class vector inside the simplex; per-class saturation
    lets the total density exceed 1."""
    base = preset_overtaking(with_saturation=True, dx=dx, T=T, cfl_safety=cfl_safety)
    model = ModelSpec(
        classes=base.model.classes,
        coupling=coupling,
        boundary=base.model.boundary,
        x_min=base.model.x_min,
        x_max=base.model.x_max,
    )
    return Scenario(
        name=f"invariant-{coupling.value}",
        model=model,
        initial=base.initial,
        T=T,
        dx=dx,
        cfl_safety=cfl_safety,
    )


def preset_delay_convergence(
    tau1: float,
    dx: float = DX_DEFAULT,
    T: float = T_DEFAULT,
    cfl_safety: float = 0.9,
) -> Scenario:
    """Two identical classes sharing one hump 50/50; only class 1 is delayed.
    As tau1 -> 0 the solution approaches the non-delayed dynamics."""
    if tau1 < 0:
        raise ValueError("tau1 must be non-negative")

    def mk_class(name, tau):
        return ClassSpec(
            name=name,
            r_max=1.0,
            speed=Greenshields(v_max=0.04, r_max=1.0),
            saturation=_exp_sat(),
            kernel=ConstantKernel(length=0.1),
            tau=tau,
        )

    model = ModelSpec(
        classes=(mk_class("delayed", tau1), mk_class("instant", 0.0)),
        coupling=Coupling.PER_CLASS,
        boundary=Boundary.PERIODIC,
        x_min=DOMAIN[0],
        x_max=DOMAIN[1],
    )
    half = Scaled(factor=0.5, base=_hump(0.25))
    return Scenario(
        name=f"delay-tau{tau1:g}",
        model=model,
        initial=InitialData(profiles=(half, half)),
        T=T,
        dx=dx,
        cfl_safety=cfl_safety,
    )


def _speed_pair(speed_family: str):
    if speed_family == "greenshields":
        law = Greenshields(v_max=0.04, r_max=1.0)
        return law, law
    if speed_family == "triangular":
        return (
            Triangular(v_max=0.04, rho_c=0.4, r_max=1.0),
            Triangular(v_max=0.04, rho_c=0.6, r_max=1.0),
        )
    raise ValueError(f"unknown speed family {speed_family!r}")


def _mixed_fleet_model(speed_family: str, tau_h: float) -> ModelSpec:
    speed_h, speed_a = _speed_pair(speed_family)
    return ModelSpec(
        classes=(
            ClassSpec(
                name="hv",
                r_max=1.0,
                speed=speed_h,
                saturation=_exp_sat(),
                kernel=LinearDecreasingKernel(length=0.1),
                tau=tau_h,
            ),
            ClassSpec(
                name="av",
                r_max=1.0,
                speed=speed_a,
                saturation=_exp_sat(),
                kernel=ConstantKernel(length=0.2),
                tau=0.0,
            ),
        ),
        coupling=Coupling.PER_CLASS,
        boundary=Boundary.PERIODIC,
        x_min=DOMAIN[0],
        x_max=DOMAIN[1],
    )


def preset_av_penetration(
    p: float,
    speed_family: str = "triangular",
    tau_h: float = 2.5,
    dx: float = DX_DEFAULT,
    T: float = T_DEFAULT,
    cfl_safety: float = 0.9,
) -> Scenario:
    """Mixed human/autonomous fleet: a fraction p of the hump drives itself.

    Humans look 0.1 ahead with linearly fading attention and react after
    tau_h; autonomous vehicles look 0.2 ahead uniformly and react instantly.
    """
    if not 0.0 <= p <= 1.0:
        raise PenetrationOutOfRange(f"penetration rate {p} outside [0, 1]")
    base = _hump(0.25)
    fraction = Constant(p)
    initial = InitialData(
        profiles=(
            SplitShare(base=base, fraction=fraction, share="complement"),
            SplitShare(base=base, fraction=fraction, share="fraction"),
        )
    )
    return Scenario(
        name=f"penetration-{speed_family}-p{p:g}-tauh{tau_h:g}",
        model=_mixed_fleet_model(speed_family, tau_h),
        initial=initial,
        T=T,
        dx=dx,
        cfl_safety=cfl_safety,
    )


#: spatial perturbation moving initial share between classes, zero outside
#: its support window
PERTURBATION = CosineBump(
    scale=1.0 / 30.0,
    freq1=20.0,
    freq2=10.0,
    stretch=4.0 / 3.0,
    shift=-0.5,
    support=(3.0 / 20.0, (3.0 * math.pi + 1.0) / 20.0),
)

PERTURBATION_BASELINE = 0.85


@lru_cache(maxsize=1)
def _perturbation_extrema() -> tuple[float, float]:
    xs = np.linspace(*PERTURBATION.support, 200001)
    vals = PERTURBATION.evaluate(xs)
    return float(vals.min()), float(vals.max())


def preset_perturbation(
    p: float,
    tau_h: float = 2.0,
    dx: float = DX_DEFAULT,
    T: float = T_DEFAULT,
    cfl_safety: float = 0.9,
) -> Scenario:
    """Constant total density 0.85 with the class split perturbed in space.

    The perturbation moves vehicles between classes without changing the
    total, so an unperturbed run would stay constant; the decay of the
    induced oscillations measures how strongly the autonomous share damps
    disturbances.  Triangular speeds, tau_h = 2 by default.
    """
    theta_min, theta_max = _perturbation_extrema()
    if p + theta_max > 1.0 or p + theta_min < 0.0:
        raise PenetrationOutOfRange(
            f"p = {p} with perturbation range [{theta_min:.4g}, {theta_max:.4g}] "
            "pushes a class share outside [0, 1]"
        )
    base = Constant(PERTURBATION_BASELINE)
    fraction = Summed(terms=(Constant(p), PERTURBATION))
    initial = InitialData(
        profiles=(
            SplitShare(base=base, fraction=fraction, share="complement"),
            SplitShare(base=base, fraction=fraction, share="fraction"),
        )
    )
    return Scenario(
        name=f"perturbation-p{p:g}",
        model=_mixed_fleet_model("triangular", tau_h),
        initial=initial,
        T=T,
        dx=dx,
        cfl_safety=cfl_safety,
    )


#: name -> (builder, accepted keyword arguments, one-line description)
PRESETS = {
    "overtaking": (
        preset_overtaking,
        ("with_saturation", "dx", "T", "cfl_safety"),
        "fast class overtaking a slow one, with or without saturation",
    ),
    "invariant-domain": (
        preset_invariant_domain,
        ("coupling", "dx", "T", "cfl_safety"),
        "overtaking data under per-class vs total-density saturation coupling",
    ),
    "delay-convergence": (
        preset_delay_convergence,
        ("tau1", "dx", "T", "cfl_safety"),
        "one delayed class approaching the non-delayed dynamics as tau1 -> 0",
    ),
    "av-penetration": (
        preset_av_penetration,
        ("p", "speed_family", "tau_h", "dx", "T", "cfl_safety"),
        "mixed human/autonomous fleet at penetration rate p",
    ),
    "perturbation": (
        preset_perturbation,
        ("p", "tau_h", "dx", "T", "cfl_safety"),
        "constant total density with a spatial class-share perturbation",
    ),
}


def build_preset(name: str, **kwargs) -> Scenario:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    builder, allowed, _ = PRESETS[name]
    unknown = set(kwargs) - set(allowed)
    if unknown:
        raise TypeError(f"preset {name!r} does not accept {sorted(unknown)}")
    return builder(**kwargs)

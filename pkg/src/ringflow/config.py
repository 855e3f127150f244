"""Scenario config files: one YAML document per run.

Layout::

    name: overtaking            # optional label
    model:                      # omitted when scenario uses a preset
      coupling: per-class | total-density
      boundary: periodic | zero-extension
      domain: {x_min: 0.0, x_max: 2.0}
      classes:
        - name: fast
          max_density: 1.0
          delay: 2.5
          speed:      {law: greenshields, v_max: 0.04, r_max: 1.0}
                    # {law: triangular, v_max: ..., rho_c: ..., r_max: ...}
          saturation: {law: exponential, steepness: 50.0, r_max: 1.0}
                    # {law: none}
          kernel:     {shape: constant, length: 0.1, mass: 1.0}
                    # {shape: linear-decreasing, ...}
    discretization:
      dx: 0.005
      T: 30.0
      cfl_safety: 0.9           # optional
      dt: 0.002                 # optional: force this step (CFL-checked)
    scenario:
      preset: overtaking        # either a named preset with its arguments...
      with_saturation: false
      # ... or inline per-class initial profiles:
      # initial:
      #   - {kind: gaussian, amplitude: 0.889, center: 0.25, rate: 100.0}
      #   - {kind: constant, value: 0.2}

Unknown keys anywhere are errors.  Every float round-trips exactly
(shortest-repr serialization).
"""

from __future__ import annotations

import yaml

from . import profiles as pr
from .errors import ParseError, SchemaError, ValidationError
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
from .scenarios import PRESETS, build_preset


def _require_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be a mapping, got {type(obj).__name__}")
    return obj


def _check_keys(mapping: dict, allowed, required, where: str) -> None:
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise SchemaError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = set(required) - set(mapping)
    if missing:
        raise SchemaError(f"{where}: missing key(s) {sorted(missing)}")


def _as_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number, got {value!r}")
    return float(value)


def _as_bool(value, where: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(f"{where} must be a boolean, got {value!r}")
    return value


# --------------------------------------------------------------------------
# Laws and kernels
# --------------------------------------------------------------------------


def _speed_from(doc, where):
    doc = _require_mapping(doc, where)
    law = doc.get("law")
    if law == "greenshields":
        _check_keys(doc, ("law", "v_max", "r_max"), ("law", "v_max", "r_max"), where)
        return Greenshields(_as_float(doc["v_max"], where), _as_float(doc["r_max"], where))
    if law == "triangular":
        _check_keys(
            doc, ("law", "v_max", "rho_c", "r_max"), ("law", "v_max", "rho_c", "r_max"), where
        )
        return Triangular(
            _as_float(doc["v_max"], where),
            _as_float(doc["rho_c"], where),
            _as_float(doc["r_max"], where),
        )
    raise SchemaError(f"{where}: unknown speed law {law!r}")


def _speed_to(law) -> dict:
    if isinstance(law, Greenshields):
        return {"law": "greenshields", "v_max": law.v_max, "r_max": law.r_max}
    if isinstance(law, Triangular):
        return {"law": "triangular", "v_max": law.v_max, "rho_c": law.rho_c, "r_max": law.r_max}
    raise SchemaError(f"cannot serialize speed law {law!r}")


def _saturation_from(doc, where):
    doc = _require_mapping(doc, where)
    law = doc.get("law")
    if law == "none":
        _check_keys(doc, ("law",), ("law",), where)
        return NoSaturation()
    if law == "exponential":
        _check_keys(
            doc, ("law", "steepness", "r_max"), ("law", "steepness", "r_max"), where
        )
        return ExponentialSaturation(
            _as_float(doc["steepness"], where), _as_float(doc["r_max"], where)
        )
    raise SchemaError(f"{where}: unknown saturation law {law!r}")


def _saturation_to(law) -> dict:
    if isinstance(law, NoSaturation):
        return {"law": "none"}
    if isinstance(law, ExponentialSaturation):
        return {"law": "exponential", "steepness": law.steepness, "r_max": law.r_max}
    raise SchemaError(f"cannot serialize saturation law {law!r}")


def _kernel_from(doc, where):
    doc = _require_mapping(doc, where)
    shape = doc.get("shape")
    kinds = {"constant": ConstantKernel, "linear-decreasing": LinearDecreasingKernel}
    if shape not in kinds:
        raise SchemaError(f"{where}: unknown kernel shape {shape!r}")
    _check_keys(doc, ("shape", "length", "mass"), ("shape", "length"), where)
    mass = _as_float(doc.get("mass", 1.0), where)
    return kinds[shape](length=_as_float(doc["length"], where), mass=mass)


def _kernel_to(kernel) -> dict:
    if isinstance(kernel, ConstantKernel):
        return {"shape": "constant", "length": kernel.length, "mass": kernel.mass}
    if isinstance(kernel, LinearDecreasingKernel):
        return {"shape": "linear-decreasing", "length": kernel.length, "mass": kernel.mass}
    raise SchemaError(f"cannot serialize kernel {kernel!r}")


# --------------------------------------------------------------------------
# Initial-data profiles
# --------------------------------------------------------------------------


def _profile_from(doc, where):
    doc = _require_mapping(doc, where)
    kind = doc.get("kind")
    if kind == "constant":
        _check_keys(doc, ("kind", "value"), ("kind", "value"), where)
        return pr.Constant(_as_float(doc["value"], where))
    if kind == "gaussian":
        _check_keys(
            doc, ("kind", "amplitude", "center", "rate"), ("kind", "amplitude", "center", "rate"),
            where,
        )
        return pr.Gaussian(
            _as_float(doc["amplitude"], where),
            _as_float(doc["center"], where),
            _as_float(doc["rate"], where),
        )
    if kind == "cosine-bump":
        keys = ("kind", "scale", "freq1", "freq2", "stretch", "shift", "support")
        _check_keys(doc, keys, keys, where)
        support = doc["support"]
        if not (isinstance(support, list) and len(support) == 2):
            raise SchemaError(f"{where}: support must be a two-element list")
        return pr.CosineBump(
            scale=_as_float(doc["scale"], where),
            freq1=_as_float(doc["freq1"], where),
            freq2=_as_float(doc["freq2"], where),
            stretch=_as_float(doc["stretch"], where),
            shift=_as_float(doc["shift"], where),
            support=(_as_float(support[0], where), _as_float(support[1], where)),
        )
    if kind == "scaled":
        _check_keys(doc, ("kind", "factor", "of"), ("kind", "factor", "of"), where)
        return pr.Scaled(_as_float(doc["factor"], where), _profile_from(doc["of"], where))
    if kind == "sum":
        _check_keys(doc, ("kind", "terms"), ("kind", "terms"), where)
        if not isinstance(doc["terms"], list):
            raise SchemaError(f"{where}: terms must be a list")
        return pr.Summed(tuple(_profile_from(t, where) for t in doc["terms"]))
    if kind == "split":
        _check_keys(
            doc, ("kind", "share", "base", "fraction"), ("kind", "share", "base", "fraction"),
            where,
        )
        if doc["share"] not in ("fraction", "complement"):
            raise SchemaError(f"{where}: share must be 'fraction' or 'complement'")
        return pr.SplitShare(
            base=_profile_from(doc["base"], where),
            fraction=_profile_from(doc["fraction"], where),
            share=doc["share"],
        )
    if kind == "samples":
        _check_keys(doc, ("kind", "values"), ("kind", "values"), where)
        if not isinstance(doc["values"], list):
            raise SchemaError(f"{where}: values must be a list")
        return pr.Samples(tuple(_as_float(v, where) for v in doc["values"]))
    raise SchemaError(f"{where}: unknown profile kind {kind!r}")


def _profile_to(profile) -> dict:
    if isinstance(profile, pr.Constant):
        return {"kind": "constant", "value": profile.value}
    if isinstance(profile, pr.Gaussian):
        return {
            "kind": "gaussian",
            "amplitude": profile.amplitude,
            "center": profile.center,
            "rate": profile.rate,
        }
    if isinstance(profile, pr.CosineBump):
        return {
            "kind": "cosine-bump",
            "scale": profile.scale,
            "freq1": profile.freq1,
            "freq2": profile.freq2,
            "stretch": profile.stretch,
            "shift": profile.shift,
            "support": [profile.support[0], profile.support[1]],
        }
    if isinstance(profile, pr.Scaled):
        return {"kind": "scaled", "factor": profile.factor, "of": _profile_to(profile.base)}
    if isinstance(profile, pr.Summed):
        return {"kind": "sum", "terms": [_profile_to(t) for t in profile.terms]}
    if isinstance(profile, pr.SplitShare):
        return {
            "kind": "split",
            "share": profile.share,
            "base": _profile_to(profile.base),
            "fraction": _profile_to(profile.fraction),
        }
    if isinstance(profile, pr.Samples):
        return {"kind": "samples", "values": list(profile.values)}
    raise SchemaError(f"profile {type(profile).__name__} is not serializable")


# --------------------------------------------------------------------------
# Model / scenario documents
# --------------------------------------------------------------------------


def _class_from(doc, where):
    doc = _require_mapping(doc, where)
    keys = ("name", "max_density", "delay", "speed", "saturation", "kernel")
    _check_keys(doc, keys, keys, where)
    if not isinstance(doc["name"], str):
        raise SchemaError(f"{where}: class name must be a string")
    try:
        return ClassSpec(
            name=doc["name"],
            r_max=_as_float(doc["max_density"], f"{where}.max_density"),
            speed=_speed_from(doc["speed"], f"{where}.speed"),
            saturation=_saturation_from(doc["saturation"], f"{where}.saturation"),
            kernel=_kernel_from(doc["kernel"], f"{where}.kernel"),
            tau=_as_float(doc["delay"], f"{where}.delay"),
        )
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _class_to(cls: ClassSpec) -> dict:
    return {
        "name": cls.name,
        "max_density": cls.r_max,
        "delay": cls.tau,
        "speed": _speed_to(cls.speed),
        "saturation": _saturation_to(cls.saturation),
        "kernel": _kernel_to(cls.kernel),
    }


def _model_from(doc) -> ModelSpec:
    doc = _require_mapping(doc, "model")
    _check_keys(
        doc,
        ("coupling", "boundary", "domain", "classes"),
        ("coupling", "boundary", "domain", "classes"),
        "model",
    )
    try:
        coupling = Coupling(doc["coupling"])
        boundary = Boundary(doc["boundary"])
    except ValueError as exc:
        raise SchemaError(f"model: {exc}") from exc
    domain = _require_mapping(doc["domain"], "model.domain")
    _check_keys(domain, ("x_min", "x_max"), ("x_min", "x_max"), "model.domain")
    if not isinstance(doc["classes"], list) or not doc["classes"]:
        raise SchemaError("model.classes must be a non-empty list")
    classes = tuple(
        _class_from(c, f"model.classes[{k}]") for k, c in enumerate(doc["classes"])
    )
    try:
        return ModelSpec(
            classes=classes,
            coupling=coupling,
            boundary=boundary,
            x_min=_as_float(domain["x_min"], "model.domain.x_min"),
            x_max=_as_float(domain["x_max"], "model.domain.x_max"),
        )
    except ValueError as exc:
        raise ValidationError(f"model: {exc}") from exc


def _model_to(model: ModelSpec) -> dict:
    return {
        "coupling": model.coupling.value,
        "boundary": model.boundary.value,
        "domain": {"x_min": model.x_min, "x_max": model.x_max},
        "classes": [_class_to(c) for c in model.classes],
    }


_PRESET_ARG_PARSERS = {
    "with_saturation": _as_bool,
    "coupling": lambda v, where: Coupling(v),
    "tau1": _as_float,
    "p": _as_float,
    "speed_family": lambda v, where: str(v),
    "tau_h": _as_float,
}


def scenario_from_dict(doc: dict) -> Scenario:
    """Build and fully validate a Scenario from a parsed config document."""
    doc = _require_mapping(doc, "scenario file")
    _check_keys(doc, ("name", "model", "discretization", "scenario"), ("discretization",),
                "scenario file")

    disc = _require_mapping(doc["discretization"], "discretization")
    _check_keys(disc, ("dx", "T", "cfl_safety", "dt"), ("dx", "T"), "discretization")
    dx = _as_float(disc["dx"], "discretization.dx")
    T = _as_float(disc["T"], "discretization.T")
    cfl_safety = _as_float(disc.get("cfl_safety", 0.9), "discretization.cfl_safety")
    dt = None if disc.get("dt") is None else _as_float(disc["dt"], "discretization.dt")

    sc_block = doc.get("scenario")
    preset_name = None
    if sc_block is not None:
        sc_block = _require_mapping(sc_block, "scenario")
        preset_name = sc_block.get("preset")

    if preset_name is not None:
        if "model" in doc:
            raise SchemaError("give either a preset or an inline model, not both")
        if preset_name not in PRESETS:
            raise SchemaError(f"scenario.preset: unknown preset {preset_name!r}")
        _, allowed, _ = PRESETS[preset_name]
        arg_keys = [k for k in allowed if k not in ("dx", "T", "cfl_safety")]
        _check_keys(sc_block, ["preset"] + arg_keys, ("preset",), "scenario")
        kwargs = {}
        for key in arg_keys:
            if key in sc_block:
                try:
                    kwargs[key] = _PRESET_ARG_PARSERS[key](sc_block[key], f"scenario.{key}")
                except ValueError as exc:
                    raise SchemaError(f"scenario.{key}: {exc}") from exc
        base = build_preset(preset_name, dx=dx, T=T, cfl_safety=cfl_safety, **kwargs)
        scenario = Scenario(
            name=doc.get("name", base.name),
            model=base.model,
            initial=base.initial,
            T=T,
            dx=dx,
            cfl_safety=cfl_safety,
            dt=dt,
        )
    else:
        if "model" not in doc:
            raise SchemaError("scenario file needs a model block or a preset")
        model = _model_from(doc["model"])
        if sc_block is None:
            raise SchemaError("scenario block with per-class initial profiles is required")
        _check_keys(sc_block, ("initial",), ("initial",), "scenario")
        if not isinstance(sc_block["initial"], list):
            raise SchemaError("scenario.initial must be a list of profiles")
        profiles = tuple(
            _profile_from(p, f"scenario.initial[{k}]")
            for k, p in enumerate(sc_block["initial"])
        )
        try:
            scenario = Scenario(
                name=doc.get("name", "custom"),
                model=model,
                initial=InitialData(profiles=profiles),
                T=T,
                dx=dx,
                cfl_safety=cfl_safety,
                dt=dt,
            )
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    # Deep validation: grid, initial ranges, kernels, CFL, delay alignment.
    from .solver import prepare

    prepare(scenario)
    return scenario


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inline (preset-independent) document reproducing the scenario."""
    disc = {"dx": scenario.dx, "T": scenario.T, "cfl_safety": scenario.cfl_safety}
    if scenario.dt is not None:
        disc["dt"] = scenario.dt
    return {
        "name": scenario.name,
        "model": _model_to(scenario.model),
        "discretization": disc,
        "scenario": {"initial": [_profile_to(p) for p in scenario.initial.profiles]},
    }


def parse_scenario(path) -> Scenario:
    """Load and validate a scenario config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError:
        raise
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if doc is None:
        raise ParseError(f"{path}: empty scenario file")
    return scenario_from_dict(doc)


def serialize_scenario(scenario: Scenario, path) -> None:
    """Write the scenario as a config file that parses back identically."""
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_dict(scenario), fh, sort_keys=False)

"""Scenario files: a small JSON schema describing one batch run.

A scenario holds the problem (order, coefficient models, forcing, window),
the initial values, the list of propagation methods, an optional list of
slow-variation parameters to sweep, and the output destination.  Complex
numbers are written as decimal literals with an optional imaginary part
("2", "-1.5", "0.3+0.25j") or as two-element [re, im] arrays.

Coefficient models (the ``coefficients`` list runs from f[0] up to f[N-1]):

    {"variant": "constant",   "value": <complex>}
    {"variant": "tabulated",  "values": [<complex>, ...], "k_first": <int>}
    {"variant": "polynomial", "coeffs": [<complex>, ...], "epsilon": <float>}
    {"variant": "sinusoidal", "amplitude": <complex>, "offset": <complex>,
                              "frequency": <float>, "phase": <float>,
                              "epsilon": <float>}

Validation returns a plain list of human-readable diagnostics so the front
end can report every problem at once instead of failing on the first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import (
    MAX_ORDER,
    MIN_ORDER,
    CoefficientModel,
    Constant,
    PolynomialInEpsK,
    RecurrenceSpec,
    SinusoidalInEpsK,
    Tabulated,
)
from .errors import RecurrenceError
from .wkb import METHOD_NAMES, check_methods

OUTPUT_FORMATS = ("csv", "json")

_TOP_KEYS = {
    "order",
    "k_start",
    "horizon",
    "coefficients",
    "forcing",
    "initial",
    "methods",
    "epsilon_sweep",
    "output",
}


class ScenarioError(ValueError):
    """Scenario file rejected; ``diagnostics`` lists every problem found."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True, eq=False)
class Scenario:
    spec: RecurrenceSpec
    initial: np.ndarray
    methods: tuple[str, ...]
    epsilon_sweep: tuple[float, ...] | None
    output_path: str
    output_format: str


def parse_complex(value) -> complex:
    """Accept real numbers, [re, im] pairs, and decimal strings like '1-2.5j'."""
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ValueError(f"cannot parse complex number from {value!r}") from None
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if isinstance(re, (int, float)) and isinstance(im, (int, float)):
            return complex(re, im)
    raise ValueError(f"cannot parse complex number from {value!r}")


_MODEL_KEYS = {
    "constant": {"variant", "value"},
    "tabulated": {"variant", "values", "k_first"},
    "polynomial": {"variant", "coeffs", "epsilon"},
    "sinusoidal": {"variant", "amplitude", "offset", "frequency", "phase", "epsilon"},
}


def _parse_model(entry, where: str, errors: list[str]) -> CoefficientModel | None:
    if not isinstance(entry, dict):
        errors.append(f"{where}: expected an object, got {type(entry).__name__}")
        return None
    variant = entry.get("variant")
    for key in sorted(set(entry) - _MODEL_KEYS.get(variant, set(entry))):
        errors.append(f"{where}: unknown key '{key}' for variant {variant!r}")
    try:
        if variant == "constant":
            return Constant(parse_complex(entry["value"]))
        if variant == "tabulated":
            values = [parse_complex(v) for v in entry["values"]]
            return Tabulated(values=np.array(values), k_first=int(entry["k_first"]))
        if variant == "polynomial":
            coeffs = tuple(parse_complex(v) for v in entry["coeffs"])
            return PolynomialInEpsK(coeffs=coeffs, epsilon=float(entry.get("epsilon", 0.0)))
        if variant == "sinusoidal":
            return SinusoidalInEpsK(
                amplitude=parse_complex(entry["amplitude"]),
                offset=parse_complex(entry["offset"]),
                frequency=float(entry.get("frequency", 1.0)),
                phase=float(entry.get("phase", 0.0)),
                epsilon=float(entry.get("epsilon", 0.0)),
            )
    except KeyError as exc:
        errors.append(f"{where}: missing field {exc}")
        return None
    except (ValueError, TypeError) as exc:
        errors.append(f"{where}: {exc}")
        return None
    errors.append(
        f"{where}: unknown variant {variant!r} "
        "(expected constant, tabulated, polynomial or sinusoidal)"
    )
    return None


def _build(data) -> tuple[Scenario | None, list[str]]:
    errors: list[str] = []
    if not isinstance(data, dict):
        return None, ["scenario must be a JSON object"]
    for key in sorted(set(data) - _TOP_KEYS):
        errors.append(f"unknown key '{key}'")

    order = data.get("order")
    if not isinstance(order, int) or isinstance(order, bool):
        errors.append("'order' must be an integer")
        order = None
    elif not MIN_ORDER <= order <= MAX_ORDER:
        errors.append(f"'order' must be in [{MIN_ORDER}, {MAX_ORDER}], got {order}")
        order = None

    k_start = data.get("k_start", 0)
    if not isinstance(k_start, int) or isinstance(k_start, bool):
        errors.append("'k_start' must be an integer")
        k_start = 0

    horizon = data.get("horizon")
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1:
        errors.append("'horizon' must be a positive integer")
        horizon = None

    coeff_entries = data.get("coefficients")
    models: list[CoefficientModel] = []
    if not isinstance(coeff_entries, list):
        errors.append("'coefficients' must be a list of model objects")
    else:
        if order is not None and len(coeff_entries) != order:
            errors.append(
                f"'coefficients' must list {order} models (f[0] first), "
                f"got {len(coeff_entries)}"
            )
        for i, entry in enumerate(coeff_entries):
            model = _parse_model(entry, f"coefficients[{i}]", errors)
            if model is not None:
                models.append(model)

    forcing = Constant(0.0)
    if "forcing" in data:
        parsed = _parse_model(data["forcing"], "forcing", errors)
        if parsed is not None:
            forcing = parsed

    initial = None
    raw_initial = data.get("initial")
    if not isinstance(raw_initial, list):
        errors.append("'initial' must be a list of complex numbers")
    else:
        try:
            initial = np.array([parse_complex(v) for v in raw_initial], dtype=complex)
        except ValueError as exc:
            errors.append(f"initial: {exc}")
        if initial is not None and order is not None and len(initial) != order:
            errors.append(f"'initial' must supply {order} values, got {len(initial)}")
            initial = None

    methods = data.get("methods")
    if (
        not isinstance(methods, list)
        or not methods
        or not all(isinstance(m, str) for m in methods)
    ):
        errors.append(f"'methods' must be a nonempty list drawn from {METHOD_NAMES}")
        methods = None

    sweep = None
    if data.get("epsilon_sweep") is not None:
        raw = data["epsilon_sweep"]
        if (
            not isinstance(raw, list)
            or not raw
            or not all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in raw)
            or any(e < 0 for e in raw)
        ):
            errors.append("'epsilon_sweep' must be a nonempty list of nonnegative numbers")
        else:
            sweep = tuple(float(e) for e in raw)

    out_path, out_format = ".", "csv"
    if "output" in data:
        out = data["output"]
        if not isinstance(out, dict):
            errors.append("'output' must be an object with 'path' and 'format'")
        else:
            out_path = out.get("path", ".")
            out_format = out.get("format", "csv")
            if not isinstance(out_path, str):
                errors.append("'output.path' must be a string")
                out_path = "."
            if out_format not in OUTPUT_FORMATS:
                errors.append(f"'output.format' must be one of {OUTPUT_FORMATS}")
                out_format = "csv"

    if errors or order is None or horizon is None or initial is None or methods is None:
        return None, errors

    try:
        spec = RecurrenceSpec(
            order=order,
            coeffs=tuple(models),
            k_start=k_start,
            horizon=horizon,
            forcing=forcing,
        )
    except (RecurrenceError, ValueError) as exc:
        return None, [str(exc)]

    errors.extend(check_methods(spec, methods))
    if errors:
        return None, errors
    return (
        Scenario(
            spec=spec,
            initial=initial,
            methods=tuple(dict.fromkeys(methods)),
            epsilon_sweep=sweep,
            output_path=out_path,
            output_format=out_format,
        ),
        [],
    )


def validate_scenario_dict(data) -> list[str]:
    """All schema and consistency problems of one scenario, without solving."""
    _, diagnostics = _build(data)
    return diagnostics


def scenario_from_dict(data) -> Scenario:
    scenario, diagnostics = _build(data)
    if scenario is None:
        raise ScenarioError(diagnostics)
    return scenario


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ScenarioError([f"not valid JSON: {exc}"]) from exc
    return scenario_from_dict(data)


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _tabulate(model: CoefficientModel, lo: int, hi: int) -> dict:
    values = [_complex_pair(model(k)) for k in range(lo, hi + 1)]
    return {"variant": "tabulated", "values": values, "k_first": lo}


def resolved_dict(scenario: Scenario) -> dict:
    """Scenario with every model exported as tabulated values over the window.

    Re-ingesting the result reproduces the run exactly: the [re, im] pairs
    round-trip through JSON at full double precision.  A sweep list is not
    carried over, because tabulated models no longer depend on the
    slow-variation parameter.
    """
    spec = scenario.spec
    lo, hi = spec.window
    return {
        "order": spec.order,
        "k_start": spec.k_start,
        "horizon": spec.horizon,
        "coefficients": [_tabulate(m, lo, hi) for m in spec.coeffs],
        "forcing": _tabulate(spec.forcing, lo, hi),
        "initial": [_complex_pair(z) for z in scenario.initial],
        "methods": list(scenario.methods),
        "output": {"path": scenario.output_path, "format": scenario.output_format},
    }

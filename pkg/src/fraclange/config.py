"""
Run configuration for the command-line front end.

A configuration is a single JSON object with flat keys. Unknown keys are
rejected, so a misspelled ``"apha"`` is an error instead of a silent default.

.. code-block:: json

    {
      "alpha": 0.5, "beta": 0.5, "T": 1.0,
      "operator": "dirichlet_laplacian_1d", "L": 3.141592653589793,
      "modes": [{"k": 1, "phi": 0.5, "psi": 1.0, "forcing": [[1.0, 1.0]]}],
      "epsilon": 0.25, "time_N": 512, "space_M": 64, "tolerance": 1e-6
    }

``forcing`` is a list of ``[c, p]`` pairs meaning :math:`\\sum c\\,t^p`.
Scalar runs use ``lam``, ``phi``, ``psi`` and ``forcing`` at the top level
instead of ``modes``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .exceptions import DomainError
from .fracops import TimeGrid, graded_exponent
from .scalar import Forcing, FractionalOrders, ScalarProblem
from .spectral import ModeSpec, OperatorSpec, SpectralProblem

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]

_KEYS = {
    "alpha", "beta", "T",
    "operator", "L", "eigenvalues",
    "lam", "phi", "psi", "forcing",
    "modes", "epsilon",
    "time_N", "grading_r", "space_M",
    "tolerance", "out",
}
_MODE_KEYS = {"k", "phi", "psi", "forcing"}


class ConfigError(DomainError):
    """The configuration file is malformed or inconsistent."""


def _number(raw: dict, key: str, default: float | None = None) -> float:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key!r} must be finite")
    return value


def _integer(raw: dict, key: str, default: int) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key!r} must be an integer, got {value!r}")
    return value


def _forcing(value: Any, where: str) -> Forcing:
    if value is None:
        return Forcing()
    if not isinstance(value, list):
        raise ConfigError(f"{where}: forcing must be a list of [c, p] pairs")
    pairs = []
    for item in value:
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)
        ):
            raise ConfigError(f"{where}: forcing entries must be [c, p] number pairs")
        pairs.append((float(item[0]), float(item[1])))
    return Forcing.from_pairs(pairs)


@dataclass(frozen=True)
class RunConfig:
    orders: FractionalOrders
    operator: OperatorSpec
    #: spectral problem (None for scalar-only configurations)
    spectral: SpectralProblem | None
    #: scalar problem (None for spectral configurations)
    scalar: ScalarProblem | None
    epsilon: float = 0.25
    time_N: int = 512
    grading_r: float | None = None
    space_M: int = 64
    tolerance: float = 1.0e-6
    out: str | None = None
    raw: dict = field(default_factory=dict, repr=False)

    def time_grid(self, N: int | None = None) -> TimeGrid:
        r = graded_exponent(self.orders.alpha) if self.grading_r is None else self.grading_r
        return TimeGrid.graded(self.orders.T, self.time_N if N is None else N, r)

    def space_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.operator.L, self.space_M + 1)

    def scalar_problems(self) -> list[ScalarProblem]:
        if self.scalar is not None:
            return [self.scalar]
        return [m.scalar_problem(self.orders) for m in self.spectral.sorted_modes()]


def parse_config(raw: Any) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(raw) - _KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

    orders = FractionalOrders(_number(raw, "alpha"), _number(raw, "beta"), _number(raw, "T", 1.0))

    kind = raw.get("operator", "dirichlet_laplacian_1d")
    L = _number(raw, "L", math.pi)
    if kind == "explicit":
        ev = raw.get("eigenvalues")
        if not isinstance(ev, list):
            raise ConfigError("an explicit operator needs an 'eigenvalues' list")
        operator = OperatorSpec.explicit([float(v) for v in ev], L)
    elif isinstance(kind, str):
        if "eigenvalues" in raw:
            raise ConfigError("'eigenvalues' is only valid with operator 'explicit'")
        operator = OperatorSpec(kind, L)
    else:
        raise ConfigError("'operator' must be a string")

    epsilon = _number(raw, "epsilon", 0.25)
    has_modes = "modes" in raw
    has_scalar = any(key in raw for key in ("lam", "phi", "psi", "forcing"))
    if has_modes and has_scalar:
        raise ConfigError("use either 'modes' or the scalar keys lam/phi/psi/forcing, not both")

    spectral = scalar = None
    if has_modes:
        modes = raw["modes"]
        if not isinstance(modes, list) or not modes:
            raise ConfigError("'modes' must be a nonempty list")
        specs = []
        for i, m in enumerate(modes):
            if not isinstance(m, dict):
                raise ConfigError(f"modes[{i}] must be an object")
            bad = sorted(set(m) - _MODE_KEYS)
            if bad:
                raise ConfigError(f"modes[{i}]: unknown keys: {', '.join(bad)}")
            k = _integer(m, "k", -1)
            if k < 1:
                raise ConfigError(f"modes[{i}]: 'k' must be an integer >= 1")
            specs.append(ModeSpec(
                k,
                operator.eigenvalue(k),
                _number(m, "phi", 0.0),
                _number(m, "psi", 0.0),
                _forcing(m.get("forcing"), f"modes[{i}]"),
            ))
        spectral = SpectralProblem(orders, operator, tuple(specs), epsilon)
    else:
        scalar = ScalarProblem(
            orders,
            _number(raw, "lam", 0.0),
            _number(raw, "phi", 0.0),
            _number(raw, "psi", 0.0),
            _forcing(raw.get("forcing"), "forcing"),
        )

    grading = raw.get("grading_r")
    if grading is not None:
        grading = _number(raw, "grading_r")
        if grading < 1.0:
            raise ConfigError("'grading_r' must be >= 1")
    time_N = _integer(raw, "time_N", 512)
    space_M = _integer(raw, "space_M", 64)
    if time_N < 4:
        raise ConfigError("'time_N' must be >= 4")
    if space_M < 1:
        raise ConfigError("'space_M' must be >= 1")
    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("'out' must be a path string")

    return RunConfig(
        orders, operator, spectral, scalar,
        epsilon=epsilon,
        time_N=time_N,
        grading_r=grading,
        space_M=space_M,
        tolerance=_number(raw, "tolerance", 1.0e-6),
        out=out,
        raw=dict(raw),
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(raw)

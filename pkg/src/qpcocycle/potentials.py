"""Trigonometric polynomial potentials and the standard presets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["TrigPotential", "amo", "pamo", "random_real_potential", "potential_from_config"]


@dataclass(frozen=True)
class TrigPotential:
    """v(x) = sum_{1<=|k|<=d} v_k e^{2 pi i k x}, with v_0 fixed to 0.

    ``real_symmetric`` asserts v_k = conj(v_{-k}) so v is real on the real
    axis; the top coefficients v_{+-d} must be nonzero (invertibility of the
    hopping block).
    """

    coeffs: dict = field(default_factory=dict)  # k -> complex, 1 <= |k| <= d
    real_symmetric: bool = True

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("potential needs at least one nonzero coefficient")
        clean = {}
        for k, c in self.coeffs.items():
            k = int(k)
            c = complex(c)
            if k == 0:
                if c != 0:
                    raise ValueError("v_0 is fixed to 0")
                continue
            clean[k] = c
        d = max(abs(k) for k in clean)
        if clean.get(d, 0) == 0 or clean.get(-d, 0) == 0:
            raise ValueError(f"top coefficients v_{{+-{d}}} must both be nonzero")
        if self.real_symmetric:
            for k in range(1, d + 1):
                if abs(clean.get(k, 0) - np.conj(clean.get(-k, 0))) > 1e-12:
                    raise ValueError(f"v_{k} != conj(v_{-k}) breaks real symmetry")
        object.__setattr__(self, "coeffs", clean)

    @property
    def degree(self) -> int:
        return max(abs(k) for k in self.coeffs)

    def coeff(self, k: int) -> complex:
        return self.coeffs.get(k, 0.0 + 0.0j)

    def eval(self, x) -> complex | np.ndarray:
        """sum v_k e^{2 pi i k x}; x may be complex or an array."""
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for k, c in sorted(self.coeffs.items()):
            out = out + c * np.exp(2j * np.pi * k * x)
        return out if out.ndim else complex(out)

    def __call__(self, x):
        return self.eval(x)

    def to_config(self) -> dict:
        return {
            "d": self.degree,
            "coeffs": [
                {"k": k, "re": c.real, "im": c.imag} for k, c in sorted(self.coeffs.items())
            ],
        }


def amo(lam: float) -> TrigPotential:
    """Almost Mathieu potential v(x) = 2 lambda cos(2 pi x)."""
    if lam == 0:
        raise ValueError("lambda = 0 leaves no top coefficient")
    return TrigPotential({1: lam, -1: lam})


def pamo(lam: float, nu: float, w: TrigPotential | dict) -> TrigPotential:
    """Perturbed almost Mathieu: v = 2 lambda cos(2 pi x) + nu * w(x)."""
    wc = w.coeffs if isinstance(w, TrigPotential) else {int(k): complex(c) for k, c in w.items()}
    coeffs: dict[int, complex] = {1: complex(lam), -1: complex(lam)}
    for k, c in wc.items():
        coeffs[k] = coeffs.get(k, 0.0) + nu * c
    return TrigPotential(coeffs)


def random_real_potential(d: int, rng: np.random.Generator, top_min: float = 0.4) -> TrigPotential:
    """Random real trigonometric polynomial of exact degree d."""
    coeffs: dict[int, complex] = {}
    for k in range(1, d + 1):
        c = complex(rng.normal(), rng.normal()) * 0.5
        if k == d and abs(c) < top_min:
            c = c + top_min * np.exp(2j * np.pi * rng.uniform())
        coeffs[k] = c
        coeffs[-k] = np.conj(c)
    return TrigPotential(coeffs)


def potential_from_config(spec) -> TrigPotential:
    """Parse {"d": int, "coeffs": [{"k":..,"re":..,"im":..}]} or presets.

    Accepted string forms: "amo:LAMBDA", "pamo:LAMBDA,NU,W_JSON_PATH" and a
    path to a JSON file with the dict form.
    """
    if isinstance(spec, TrigPotential):
        return spec
    if isinstance(spec, str):
        if spec.startswith("amo:"):
            return amo(float(spec.split(":", 1)[1]))
        if spec.startswith("pamo:"):
            lam, nu, path = spec.split(":", 1)[1].split(",", 2)
            with open(path) as fh:
                w = potential_from_config(json.load(fh))
            return pamo(float(lam), float(nu), w)
        with open(spec) as fh:
            return potential_from_config(json.load(fh))
    if isinstance(spec, dict):
        if "preset" in spec:
            name = spec["preset"]
            if name == "amo":
                return amo(float(spec["lambda"]))
            if name == "pamo":
                return pamo(float(spec["lambda"]), float(spec["nu"]),
                            potential_from_config(spec["w"]))
            raise ValueError(f"unknown preset {name!r}")
        coeffs = {int(c["k"]): complex(float(c["re"]), float(c.get("im", 0.0)))
                  for c in spec["coeffs"]}
        pot = TrigPotential(coeffs, real_symmetric=bool(spec.get("real_symmetric", True)))
        if "d" in spec and int(spec["d"]) != pot.degree:
            raise ValueError("declared degree does not match coefficients")
        return pot
    raise TypeError(f"cannot parse potential from {type(spec)!r}")

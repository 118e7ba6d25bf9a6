"""
Perturbation mini-language: ``none``, ``gauss:<amp>``, ``eig:<k>``,
``bump:<amp>:<center>:<width>``.
"""
from dataclasses import dataclass

import numpy as np

from henon_blowup.utils.errors import ValidationError


@dataclass(frozen=True)
class Perturbation:
    kind: str
    amplitude: float = 0.0
    center: float = 0.0
    width: float = 1.0
    index: int = 0

    def radial(self):
        """Callable r -> value; eig perturbations have no closed form."""
        if self.kind == "none":
            return None
        if self.kind == "gauss":
            amp = self.amplitude
            return lambda r: amp * np.exp(-np.asarray(r, dtype=float) ** 2)
        if self.kind == "bump":
            amp, center, width = self.amplitude, self.center, self.width
            return lambda r: amp * np.exp(-((np.asarray(r, dtype=float) - center) / width) ** 2)
        raise ValidationError(f"perturbation {self.kind!r} has no radial closed form")

    def describe(self):
        if self.kind == "none":
            return "none"
        if self.kind == "gauss":
            return f"gauss:{self.amplitude:g}"
        if self.kind == "eig":
            return f"eig:{self.index:d}"
        return f"bump:{self.amplitude:g}:{self.center:g}:{self.width:g}"


def parse_perturbation(text):
    """Parse the --perturb argument."""
    parts = str(text).strip().split(":")
    kind = parts[0].lower()
    try:
        if kind == "none" and len(parts) == 1:
            return Perturbation("none")
        if kind == "gauss" and len(parts) == 2:
            return Perturbation("gauss", amplitude=float(parts[1]))
        if kind == "eig" and len(parts) == 2:
            index = int(parts[1])
            if index < 0:
                raise ValueError(index)
            return Perturbation("eig", index=index)
        if kind == "bump" and len(parts) == 4:
            width = float(parts[3])
            if width <= 0:
                raise ValueError(width)
            return Perturbation("bump", amplitude=float(parts[1]), center=float(parts[2]), width=width)
    except ValueError:
        pass
    raise ValidationError(f"cannot parse perturbation {text!r}")

"""Dimensional constants for the eigenvalue bounds, with provenance."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from scipy.special import jn_zeros, jv

J01 = float(jn_zeros(0, 1)[0])
"""First positive zero of J0; the unit disc has λ₁ = J01²."""

J0_PRIME_AT_J01 = float(abs(jv(1, J01)))
"""|J0'(j₀,₁)| = J1(j₀,₁), the boundary slope of the unit-disc ground state."""

ANALYTIC = "analytic"
CALIBRATED = "calibrated"

# Frozen output of ``obstacle-spectra calibrate`` on the default family
# (square, disc, 1x2 and 1x4 rectangles, equilateral triangle at h = 1/64,
# plus the default obstacle cases). Regenerate with the CLI when the family
# or the solver changes.
_CALIBRATED_R0 = 1.5702593593271266  # set by the 1x4 rectangle
_CALIBRATED_C0 = 1.0


@dataclass
class ConstantsProfile:
    """Constants of the placement bounds.

    ``c0`` is the eigenvalue of the unit ball, ``r0`` the wavelength radius of
    the ball inscribed at a maximum point, ``beta0`` the plateau of the bound
    function (``c0 / r0**2``, which makes it continuous), ``C0`` the
    containment threshold for convex obstacles and ``C1``/``C2`` the lower and
    upper constants of ``inrad * sqrt(lambda1)``.
    """

    n: int
    c0: float
    r0: float
    C0: float
    C1: float
    C2: float
    omega_n: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("c0", "r0", "C0", "C1", "C2", "omega_n"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"constant {name} must be positive and finite, got {value}")

    @property
    def beta0(self) -> float:
        return self.c0 / self.r0 ** 2

    @property
    def localization_threshold(self) -> float:
        """Smallest ratio μ/λ₁ for which localization is not vacuous."""
        return self.c0 / self.r0 ** 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["beta0"] = self.beta0
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ConstantsProfile":
        keys = ("n", "c0", "r0", "C0", "C1", "C2", "omega_n")
        missing = [k for k in keys if k not in data]
        if missing:
            raise ValueError(f"constants profile is missing keys: {', '.join(missing)}")
        return cls(**{k: data[k] for k in keys}, provenance=dict(data.get("provenance", {})))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "ConstantsProfile":
        return cls.from_dict(json.loads(Path(path).read_text()))


def analytic_2d() -> ConstantsProfile:
    """Planar profile.

    c0 = j₀,₁² and omega_2 = π are exact. C2 = j₀,₁ follows from inclusion of
    the inscribed disc, C1 = π/2 is the classical inradius bound for convex domains. r0 and
    C0 have no closed form and come from the frozen calibration.
    """
    return ConstantsProfile(
        n=2,
        c0=J01 ** 2,
        r0=_CALIBRATED_R0,
        C0=_CALIBRATED_C0,
        C1=math.pi / 2,
        C2=J01,
        omega_n=math.pi,
        provenance={"c0": ANALYTIC, "r0": CALIBRATED, "C0": CALIBRATED,
                    "C1": ANALYTIC, "C2": ANALYTIC, "omega_n": ANALYTIC},
    )


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def volume_fraction_radius(eps0: float, n: int) -> float:
    """Wavelength radius eps0**((n-2)/(2n)) of the near-inscribed ball."""
    if not 0 < eps0 < 1:
        raise ValueError("eps0 must lie in (0, 1)")
    return eps0 ** ((n - 2) / (2 * n))

"""Normalized unit system, atom/scenario configuration, and the coupling g.

Everything downstream of this module works in normalized units anchored to
the plasma frequency: frequencies in omega_p, lengths in c/omega_p, times in
1/omega_p. The only SI quantities are omega_p itself, the dipole matrix
element |gamma| in C*m, and output forces in newtons.

The dimensionless coupling

    g = (|gamma| / hbar w_spp) * sqrt(hbar w_spp / (32 pi eps0 z0^3)),

with w_spp taken equal to the transition frequency w0, separates weak
(g << 1) from strong (g >= 0.5) coupling. Configurations may specify either
|gamma| directly or a target g from which |gamma| is back-solved.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace

from .constants import C_LIGHT, EPS0, HBAR
from .errors import ConfigError
from .material import MaterialConfig

BACKENDS = ("SommerfeldHalfSpace", "QuasistaticHalfSpace", "LorentzianModel")
STATES = ("excited", "ground")


@dataclass(frozen=True)
class UnitSystem:
    """Normalization anchor: all scales derive from the SI plasma frequency."""

    omega_p_si: float = 2 * math.pi * 200e12  # rad/s

    def __post_init__(self):
        if self.omega_p_si <= 0:
            raise ConfigError(f"omega_p_si must be > 0, got {self.omega_p_si}")

    @property
    def time_unit_s(self) -> float:
        return 1.0 / self.omega_p_si

    @property
    def length_unit_m(self) -> float:
        return C_LIGHT / self.omega_p_si

    def frequency_to_si(self, w: float) -> float:
        return w * self.omega_p_si

    def frequency_to_normalized(self, w_si: float) -> float:
        return w_si / self.omega_p_si

    def length_to_si(self, z: float) -> float:
        return z * self.length_unit_m

    def length_to_normalized(self, z_m: float) -> float:
        return z_m / self.length_unit_m

    def time_to_si(self, t: float) -> float:
        return t * self.time_unit_s

    def time_to_normalized(self, t_s: float) -> float:
        return t_s / self.time_unit_s


@dataclass(frozen=True)
class AtomConfig:
    """Two-level atom: transition frequency, height, and dipole specification.

    omega0 in units of omega_p, z0 in units of c/omega_p. Exactly one of
    dipole_cm (|gamma| in C*m) or coupling_g must be given; polarization is
    fixed to z (vertical).
    """

    omega0: float
    z0: float
    dipole_cm: float | None = None
    coupling_g: float | None = None
    polarization: str = "z"

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ConfigError(f"omega0 must be > 0, got {self.omega0}")
        if self.z0 <= 0:
            raise ConfigError(f"z0 must be > 0, got {self.z0}")
        if self.polarization != "z":
            raise ConfigError("only vertical (z) polarization is supported")
        if (self.dipole_cm is None) == (self.coupling_g is None):
            raise ConfigError("specify exactly one of dipole_cm or coupling_g")
        spec = self.dipole_cm if self.dipole_cm is not None else self.coupling_g
        if spec < 0:
            raise ConfigError("dipole specification must be >= 0")

    def resolve_dipole_cm(self, units: UnitSystem) -> float:
        """|gamma| in C*m, back-solving from the target g when needed."""
        if self.dipole_cm is not None:
            return self.dipole_cm
        return invert_g_for_dipole(self.coupling_g, self.z0, self.omega0, units)


def _g_per_dipole(z0: float, omega0: float, units: UnitSystem) -> float:
    # g / |gamma| = sqrt(1 / (32 pi eps0 hbar w_spp z0_si^3)), w_spp = w0
    if z0 <= 0 or omega0 <= 0:
        raise ConfigError("z0 and omega0 must be > 0")
    w_spp_si = units.frequency_to_si(omega0)
    z0_si = units.length_to_si(z0)
    return 1.0 / math.sqrt(32 * math.pi * EPS0 * HBAR * w_spp_si * z0_si**3)


def compute_coupling_g(atom: AtomConfig, units: UnitSystem) -> float:
    """Dimensionless coupling g for the configured atom.

    Scales as |gamma| * z0^(-3/2) at fixed omega0.
    """
    gamma_cm = atom.resolve_dipole_cm(units)
    return gamma_cm * _g_per_dipole(atom.z0, atom.omega0, units)


def invert_g_for_dipole(
    g_target: float, z0: float, omega0: float, units: UnitSystem
) -> float:
    """|gamma| in C*m whose forward coupling map returns g_target."""
    if g_target < 0:
        raise ConfigError(f"g_target must be >= 0, got {g_target}")
    return g_target / _g_per_dipole(z0, omega0, units)


@dataclass(frozen=True)
class OmegaGrid:
    """Reservoir sampling grid: (0, omega_max] with refinement near the SPP peak."""

    omega_max: float = 3.0
    n_points: int = 1400
    refine: bool = True

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigError(f"n_points must be >= 2, got {self.n_points}")
        if self.omega_max <= 0:
            raise ConfigError(f"omega_max must be > 0, got {self.omega_max}")


@dataclass(frozen=True)
class TimeGrid:
    """Run length in units of 1/Gamma_FM or 1/omega_p; n_steps = 0 means auto."""

    t_final: float = 6.0
    units: str = "gamma"  # "gamma" | "omega_p"
    n_steps: int = 0

    def __post_init__(self):
        if self.t_final <= 0:
            raise ConfigError(f"t_final must be > 0, got {self.t_final}")
        if self.units not in ("gamma", "omega_p"):
            raise ConfigError(f"t_final_units must be gamma|omega_p, got {self.units}")
        if self.n_steps and self.n_steps < 2:
            raise ConfigError(f"n_steps must be >= 2, got {self.n_steps}")


@dataclass(frozen=True)
class Scenario:
    """Full physical configuration consumed by every other module."""

    units: UnitSystem = field(default_factory=UnitSystem)
    atom: AtomConfig = field(default_factory=lambda: AtomConfig(omega0=0.65, z0=0.7, coupling_g=0.044))
    material: MaterialConfig = field(default_factory=MaterialConfig)
    reservoir_backend: str = "SommerfeldHalfSpace"
    omega_grid: OmegaGrid = field(default_factory=OmegaGrid)
    time_grid: TimeGrid = field(default_factory=TimeGrid)
    state: str = "excited"

    def __post_init__(self):
        if self.reservoir_backend not in BACKENDS:
            raise ConfigError(
                f"unknown reservoir_backend {self.reservoir_backend!r}; "
                f"expected one of {BACKENDS}"
            )
        if self.state not in STATES:
            raise ConfigError(f"state must be excited|ground, got {self.state!r}")
        if self.omega_grid.omega_max <= self.atom.omega0:
            raise ConfigError(
                f"omega_max ({self.omega_grid.omega_max}) must exceed "
                f"omega0 ({self.atom.omega0})"
            )

    def coupling_g(self) -> float:
        return compute_coupling_g(self.atom, self.units)

    def dipole_cm(self) -> float:
        return self.atom.resolve_dipole_cm(self.units)

    def with_state(self, state: str) -> "Scenario":
        return replace(self, state=state)


# Scenario file format: plain text `key = value`, one per line, `#` comments.
_SCENARIO_KEYS = (
    "omega_p_hz",
    "omega0_over_omega_p",
    "z0_in_c_over_omega_p",
    "collision_over_omega_p",
    "cyclotron_over_omega_p",
    "coupling_g",
    "dipole_cm",
    "reservoir_backend",
    "omega_max_over_omega_p",
    "n_omega",
    "t_final",
    "t_final_units",
    "n_steps",
    "state",
)


def parse_scenario(text: str) -> Scenario:
    """Parse the `key = value` scenario format. Unknown keys are a hard error."""
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCENARIO_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in kv:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        kv[key] = value

    def fget(key, default=None):
        if key not in kv:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            return default
        try:
            return float(kv[key])
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not a number: {kv[key]!r}") from exc

    def iget(key, default):
        if key not in kv:
            return default
        try:
            return int(kv[key])
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not an integer: {kv[key]!r}") from exc

    units = UnitSystem(omega_p_si=2 * math.pi * fget("omega_p_hz", 200e12))
    if "coupling_g" in kv and "dipole_cm" in kv:
        raise ConfigError("specify only one of coupling_g or dipole_cm")
    dipole_cm = fget("dipole_cm") if "dipole_cm" in kv else None
    coupling_g = fget("coupling_g") if "coupling_g" in kv else None
    if dipole_cm is None and coupling_g is None:
        raise ConfigError("one of coupling_g or dipole_cm is required")
    atom = AtomConfig(
        omega0=fget("omega0_over_omega_p"),
        z0=fget("z0_in_c_over_omega_p"),
        dipole_cm=dipole_cm,
        coupling_g=coupling_g,
    )
    material = MaterialConfig(
        gamma_c=fget("collision_over_omega_p", 1e-3),
        omega_c=fget("cyclotron_over_omega_p", 0.0),
    )
    backend = kv.get("reservoir_backend", "SommerfeldHalfSpace")
    omega_grid = OmegaGrid(
        omega_max=fget("omega_max_over_omega_p", 3.0),
        n_points=iget("n_omega", 1400),
    )
    time_grid = TimeGrid(
        t_final=fget("t_final", 6.0),
        units=kv.get("t_final_units", "gamma"),
        n_steps=iget("n_steps", 0),
    )
    return Scenario(
        units=units,
        atom=atom,
        material=material,
        reservoir_backend=backend,
        omega_grid=omega_grid,
        time_grid=time_grid,
        state=kv.get("state", "excited"),
    )


def render_scenario(s: Scenario) -> str:
    """Canonical text form; parse(render(s)) == s field-for-field."""
    lines = [
        f"omega_p_hz = {s.units.omega_p_si / (2 * math.pi)!r}",
        f"omega0_over_omega_p = {s.atom.omega0!r}",
        f"z0_in_c_over_omega_p = {s.atom.z0!r}",
        f"collision_over_omega_p = {s.material.gamma_c!r}",
        f"cyclotron_over_omega_p = {s.material.omega_c!r}",
    ]
    if s.atom.dipole_cm is not None:
        lines.append(f"dipole_cm = {s.atom.dipole_cm!r}")
    else:
        lines.append(f"coupling_g = {s.atom.coupling_g!r}")
    lines += [
        f"reservoir_backend = {s.reservoir_backend}",
        f"omega_max_over_omega_p = {s.omega_grid.omega_max!r}",
        f"n_omega = {s.omega_grid.n_points}",
        f"t_final = {s.time_grid.t_final!r}",
        f"t_final_units = {s.time_grid.units}",
        f"n_steps = {s.time_grid.n_steps}",
        f"state = {s.state}",
    ]
    return "\n".join(lines) + "\n"


def scenario_digest(s: Scenario) -> str:
    """Content hash of the resolved configuration (stamped into every CSV)."""
    return hashlib.sha256(render_scenario(s).encode()).hexdigest()[:16]

"""Central values of Dirichlet L-functions mod p^k averaged over Galois orbits."""

__version__ = "0.1.0"

from .characters import DirichletCharacter, UnitGroup, unit_group  # noqa: E402
from .lvalue import AfeConfig, afe_family, central_value_afe, central_value_hurwitz  # noqa: E402
from .mollifier import MollifierSpec, iwaniec_sarnak_coefficients  # noqa: E402
from .moments import MomentReport, moment_report  # noqa: E402
from .orbits import OrbitSpec, ThinOrbitSpec, enumerate_orbit, enumerate_thin_orbit  # noqa: E402

__all__ = [
    "AfeConfig", "DirichletCharacter", "MollifierSpec", "MomentReport", "OrbitSpec",
    "ThinOrbitSpec", "UnitGroup", "afe_family", "central_value_afe", "central_value_hurwitz",
    "enumerate_orbit", "enumerate_thin_orbit", "iwaniec_sarnak_coefficients", "moment_report",
    "unit_group",
]

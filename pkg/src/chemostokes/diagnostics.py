"""Per-step diagnostic records and the time series container."""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields

import numpy as np

# Fixed column order of the time-series CSV.
CSV_COLUMNS = (
    "t", "mass_n1", "mass_n2", "linf_n1_dev", "linf_n2_dev", "linf_c",
    "l2_c", "linf_u", "l2_u", "min_n2", "energy", "dissipation",
    "max_divu", "dt",
)

# Extra columns kept for re-weighting the energy under candidate
# coefficients; stored in a companion file, not the main CSV.
COMPONENT_COLUMNS = ("t", "ent_n1", "ent_n2", "c_sq", "dissipation")


@dataclass
class DiagnosticsRecord:
    t: float
    mass_n1: float
    mass_n2: float
    linf_n1_dev: float
    linf_n2_dev: float
    linf_c: float
    l2_c: float
    linf_u: float
    l2_u: float
    min_n2: float
    energy: float
    dissipation: float
    max_divu: float
    dt: float
    # energy components: E(k, l) = ent_n1 + k * ent_n2 + (l / 2) * c_sq
    ent_n1: float = float("nan")
    ent_n2: float = float("nan")
    c_sq: float = float("nan")


@dataclass
class DiagnosticsSeries:
    """Ordered records plus the run metadata the evaluators need."""

    records: list = field(default_factory=list)
    case: str | None = None          # "coexistence" | "exclusion" | None
    n1_inf: float = float("nan")
    n2_inf: float = float("nan")
    k: float = 1.0                   # coefficients used for the E column
    l: float = 1.0

    def append(self, record: DiagnosticsRecord) -> None:
        if self.records and record.t <= self.records[-1].t:
            raise ValueError("record times must be strictly increasing")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in dc_fields(DiagnosticsRecord))

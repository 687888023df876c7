"""Batch runs over the chemotactic sensitivity: the boundedness probe.

Global boundedness is guaranteed only for small chi/mu; the threshold itself
is not computable, so the sweep just records the observed sup norms against
chi/mu without asserting any cutoff. Each run owns a subdirectory; failures
are recorded and the sweep continues.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field

from .config import RunConfig
from .errors import SimulationAbort, ValidationError
from .integrator import run
from .io import write_meta, write_run_outputs


@dataclass
class SweepRow:
    chi: float
    chi_over_mu: float
    sup_linf_sum: float
    completed: bool
    final_energy: float
    error: str = ""


@dataclass
class SweepSummary:
    rows: list = field(default_factory=list)
    out_dir: str = ""

    def table(self) -> str:
        header = f"{'chi':>10} {'chi/mu':>10} {'sup|n1|+|n2|':>14} {'completed':>10} {'final E':>12}"
        lines = [header]
        for r in self.rows:
            lines.append(f"{r.chi:>10.4g} {r.chi_over_mu:>10.4g} "
                         f"{r.sup_linf_sum:>14.6g} {str(r.completed):>10} "
                         f"{r.final_energy:>12.4g}"
                         + (f"  [{r.error}]" if r.error else ""))
        return "\n".join(lines) + "\n"


def run_sweep(base: RunConfig, chi_values, out_dir) -> SweepSummary:
    """One simulation per chi (chi1 = chi2 = chi), each in its own directory."""
    chi_values = [float(v) for v in chi_values]
    if not chi_values:
        raise ValidationError("sweep needs at least one chi value")
    if any(v <= 0 for v in chi_values):
        raise ValidationError("sweep chi values must be positive")
    if any(b <= a for a, b in zip(chi_values, chi_values[1:])):
        raise ValidationError("sweep chi values must be strictly ascending")

    os.makedirs(out_dir, exist_ok=True)
    mu = min(base.params.mu1, base.params.mu2)
    summary = SweepSummary(out_dir=str(out_dir))
    for chi in chi_values:
        params = dataclasses.replace(base.params, chi1=chi, chi2=chi)
        sub = os.path.join(out_dir, f"chi_{chi:g}")
        cfg = base.replace(params=params, output_dir=sub)
        row = SweepRow(chi=chi, chi_over_mu=chi / mu, sup_linf_sum=math.nan,
                       completed=False, final_energy=math.nan)
        try:
            result = run(cfg)
            row.completed = True
        except SimulationAbort as exc:
            result = getattr(exc, "partial", None)
            row.error = exc.reason
        except ValidationError as exc:
            result = None
            row.error = str(exc)
        if result is not None:
            write_run_outputs(result, cfg, sub)
            row.sup_linf_sum = result.monitors.sup_linf_sum
            if result.series.records:
                row.final_energy = result.series.records[-1].energy
        summary.rows.append(row)

    _write_summary_files(summary, out_dir)
    return summary


def _write_summary_files(summary: SweepSummary, out_dir) -> None:
    csv_path = os.path.join(out_dir, "sweep_summary.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("chi,chi_over_mu,sup_linf_sum,completed,final_energy,error\n")
        for r in summary.rows:
            fh.write(f"{r.chi:.17g},{r.chi_over_mu:.17g},{r.sup_linf_sum:.17g},"
                     f"{int(r.completed)},{r.final_energy:.17g},{r.error}\n")
    with open(os.path.join(out_dir, "sweep_summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(summary.table())
    write_meta({"runs": len(summary.rows),
                "completed": sum(r.completed for r in summary.rows)},
               os.path.join(out_dir, "sweep_meta.txt"))

"""CSV export of invariant histories."""

from __future__ import annotations

import csv
from collections.abc import Iterable
from pathlib import Path

from src.momentum_map.invariants import InvariantRecord

INVARIANT_COLUMNS: tuple[str, ...] = (
    "t",
    "H",
    "P1", "P2", "P3",
    "Pc1", "Pc2", "Pc3",
    "J1", "J2", "J3",
    "Jc1", "Jc2", "Jc3",
    "pi_norm",
    "div_A_max",
    "div_Pi_max",
    "gauss_residual",
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


class InvariantExporter:
    """Export invariant records to CSV format."""

    @staticmethod
    def record_row(record: InvariantRecord) -> list[str]:
        values = [
            record.t,
            record.H,
            *record.P,
            *record.P_c,
            *record.J,
            *record.J_c,
            record.pi_norm,
            record.div_A_max,
            record.div_Pi_max,
            record.gauss_residual,
        ]
        return [_fmt(v) for v in values]

    @staticmethod
    def export_records(
        records: Iterable[InvariantRecord],
        output_path: str | Path,
        include_header: bool = True,
    ) -> None:
        """
        Export records to a CSV file, one row per observation time.

        Args:
            records: Invariant records in time order
            output_path: Path to the output CSV file
            include_header: Whether to include the header row
        """
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)

        with open(output_path, "w", newline="", encoding="utf-8") as csvfile:
            writer = csv.writer(csvfile, lineterminator="\n")
            if include_header:
                writer.writerow(INVARIANT_COLUMNS)
            for record in records:
                writer.writerow(InvariantExporter.record_row(record))

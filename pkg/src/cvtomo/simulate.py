"""Born-rule measurement simulation with Poissonian shot noise.

A dataset maps each measurement operator to an observed frequency
f_i = w_i Tr(rho M_i), optionally corrupted by counting noise: each record
draws counts ~ Poisson(lam * ideal / mean(ideal)) with lam = (100/snr)**2,
so a mean-strength outcome fluctuates by snr percent. Noise draws use
per-record counter seeding (seed XOR record index), which makes datasets
reproducible record by record.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateDataError, DimensionMismatchError, DomainError
from .fock import DensityMatrix
from .povm import POVMElement

IMAG_TRACE_TOL = 1e-10


@dataclass(frozen=True)
class NoiseConfig:
    """Poisson noise at a given signal-to-noise percentage (default 10%)."""

    enabled: bool = True
    snr_percent: float = 10.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.snr_percent <= 100.0:
            raise DomainError(f"snr_percent must lie in (0, 100], got {self.snr_percent}")

    @property
    def intensity(self) -> float:
        """Poisson intensity at the mean signal level, lam = (100/snr)**2."""
        return (100.0 / self.snr_percent) ** 2

    def to_json_dict(self) -> dict:
        return {"enabled": self.enabled, "snr_percent": self.snr_percent, "seed": self.seed}

    @classmethod
    def from_json_dict(cls, data) -> "NoiseConfig":
        return cls(enabled=bool(data["enabled"]), snr_percent=float(data["snr_percent"]),
                   seed=int(data["seed"]))


@dataclass(frozen=True)
class MeasurementRecord:
    """One (operator, observed frequency) pair plus noiseless diagnostics."""

    element_id: str
    frequency: float
    ideal: float
    counts: int | None = None

    def __post_init__(self) -> None:
        if self.frequency < 0 or self.ideal < 0:
            raise DomainError("frequencies are non-negative by construction")


def expectation(rho: DensityMatrix, element: POVMElement) -> float:
    """Weighted Born-rule value w Tr(rho M); the imaginary residue is checked."""
    if rho.dim != element.matrix.shape[0]:
        raise DimensionMismatchError(
            f"state dimension {rho.dim} != element dimension {element.matrix.shape[0]}")
    tr = complex(np.einsum("ij,ji->", rho.entries, element.matrix))
    if abs(tr.imag) > IMAG_TRACE_TOL:
        raise DomainError(f"trace has imaginary residue {tr.imag:.3e} beyond tolerance")
    return float(element.weight * tr.real)


def simulate(rho: DensityMatrix, elements: Sequence[POVMElement],
             noise: NoiseConfig) -> list[MeasurementRecord]:
    """Measure every element against the state, with optional Poisson noise.

    Noiseless records have frequency == ideal exactly. With noise on, the
    i-th record uses its own generator seeded with noise.seed XOR i, so the
    dataset is deterministic and insensitive to evaluation order.
    """
    if not elements:
        raise DegenerateDataError("no measurement elements supplied")
    ideals = np.array([max(0.0, expectation(rho, el)) for el in elements])
    if not noise.enabled:
        return [MeasurementRecord(el.id, float(v), float(v))
                for el, v in zip(elements, ideals)]

    scale = float(np.mean(ideals))
    if scale <= 0.0:
        raise DegenerateDataError("all ideal expectations vanish; nothing to observe")
    lam = noise.intensity
    records = []
    for i, (el, ideal) in enumerate(zip(elements, ideals)):
        rng = np.random.default_rng(noise.seed ^ i)
        counts = int(rng.poisson(lam * ideal / scale))
        freq = scale * counts / lam
        records.append(MeasurementRecord(el.id, freq, float(ideal), counts))
    return records


# --------------------------------------------------------------------------
# dataset persistence: JSON lines with a leading header line
# --------------------------------------------------------------------------

def save_dataset(path, records: Sequence[MeasurementRecord], *,
                 state_spec: dict | None = None, trunc: dict | None = None,
                 grid: dict | None = None, noise: NoiseConfig | None = None) -> None:
    lines = [json.dumps({
        "state_spec": state_spec, "trunc": trunc, "grid": grid,
        "noise": noise.to_json_dict() if noise else None,
        "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    })]
    for rec in records:
        lines.append(json.dumps({
            "element_id": rec.element_id, "frequency": rec.frequency,
            "ideal": rec.ideal, "counts": rec.counts,
        }))
    Path(path).write_text("\n".join(lines) + "\n")


def load_dataset(path) -> tuple[list[MeasurementRecord], dict]:
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise DegenerateDataError(f"dataset file {path} is empty")
    header = json.loads(text[0])
    records = []
    for line in text[1:]:
        d = json.loads(line)
        records.append(MeasurementRecord(
            element_id=d["element_id"], frequency=float(d["frequency"]),
            ideal=float(d["ideal"]),
            counts=None if d.get("counts") is None else int(d["counts"])))
    return records, header

"""Weighted informationally-complete measurement families.

Two element families are provided, both rank-1 projectors onto product
vectors of the truncated Fock space:

* rotated-quadrature projectors |q_theta><q_theta| (homodyne detection),
  with <n|q_theta> = psi_n(q) e^{i n theta};
* coherent-state projectors |z><z| (heterodyne detection).

Weights attach the phase-space measure of each sample so that dense grids
approximately resolve the identity on the truncated space:

    sum_i w_i E_i  ~  I,   w = prod_modes dq dtheta / pi   (quadrature)
                           w = prod_modes d2z / pi         (coherent)

Elements are projectors of truncated vectors, so they stay rank-1 and PSD
exactly. The pair (q, theta) and (-q, theta + pi) label the same projector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CompletenessError, DimensionMismatchError, DomainError
from .fock import TruncationConfig, coherent_amplitudes, hermite_basis

GRID_MATCH_TOL = 1e-9
OPERATOR_SUM_BOUND = 1.05


@dataclass(frozen=True)
class QuadraturePoint:
    """One homodyne sample: quadrature value q at local-oscillator phase theta."""

    q: float
    theta: float


@dataclass(frozen=True)
class CoherentPoint:
    """One heterodyne sample: coherent amplitude z = (q + ip)/sqrt(2)."""

    z: complex

    def __post_init__(self) -> None:
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError(f"coherent point must be finite, got {z}")


@dataclass(frozen=True, eq=False)
class POVMElement:
    """A weighted rank-1 measurement operator with its phase-space coordinates."""

    id: str
    matrix: np.ndarray
    weight: float
    coords: tuple
    kind: str  # "quadrature" | "coherent"

    def __post_init__(self) -> None:
        if self.weight <= 0:
            raise DomainError(f"element weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class SamplingGrid:
    """Product sampling grid over phase space; all modes share the same axes.

    kind == "quadrature": axes are q_values x theta_values per mode.
    kind == "coherent":   the axis is z_values (real line) per mode; the
    per-sample cell area defaults to dz**2 unless z_im_width is given.
    """

    kind: str
    modes: int = 1
    q_values: tuple = ()
    theta_values: tuple = ()
    z_values: tuple = ()
    z_im_width: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("quadrature", "coherent"):
            raise DomainError(f"grid kind must be quadrature|coherent, got {self.kind!r}")
        if self.modes < 1:
            raise DomainError("grid needs at least one mode")
        for name in ("q_values", "theta_values", "z_values"):
            vals = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, vals)
            if len(vals) > 1 and any(b <= a for a, b in zip(vals, vals[1:])):
                raise DomainError(f"{name} must be strictly increasing")
        if self.kind == "quadrature" and (not self.q_values or not self.theta_values):
            raise DomainError("quadrature grid needs q_values and theta_values")
        if self.kind == "coherent" and not self.z_values:
            raise DomainError("coherent grid needs z_values")

    # -- constructors ------------------------------------------------------
    @classmethod
    def quadrature(cls, q_count: int = 7, theta_count: int = 5, modes: int = 1,
                   q_range: tuple[float, float] = (-5.0, 5.0),
                   theta_range: tuple[float, float] = (0.0, math.pi)) -> "SamplingGrid":
        qs = np.linspace(q_range[0], q_range[1], q_count)
        ths = np.linspace(theta_range[0], theta_range[1], theta_count)
        return cls(kind="quadrature", modes=modes,
                   q_values=tuple(qs), theta_values=tuple(ths))

    @classmethod
    def coherent(cls, z_count: int = 10, modes: int = 1,
                 z_range: tuple[float, float] = (0.0, 2.0),
                 z_im_width: float | None = None) -> "SamplingGrid":
        zs = np.linspace(z_range[0], z_range[1], z_count)
        return cls(kind="coherent", modes=modes, z_values=tuple(zs),
                   z_im_width=z_im_width)

    # -- geometry ----------------------------------------------------------
    @property
    def dq(self) -> float:
        return self.q_values[1] - self.q_values[0] if len(self.q_values) > 1 else 1.0

    @property
    def dtheta(self) -> float:
        return (self.theta_values[1] - self.theta_values[0]
                if len(self.theta_values) > 1 else math.pi)

    @property
    def dz(self) -> float:
        return self.z_values[1] - self.z_values[0] if len(self.z_values) > 1 else 1.0

    @property
    def cell_area_z(self) -> float:
        """Phase-space cell area assigned to one coherent sample."""
        width = self.z_im_width if self.z_im_width is not None else self.dz
        return self.dz * width

    @property
    def points_per_mode(self) -> int:
        if self.kind == "quadrature":
            return len(self.q_values) * len(self.theta_values)
        return len(self.z_values)

    @property
    def cardinality(self) -> int:
        """Number of product elements on the full grid."""
        return self.points_per_mode ** self.modes

    def mode_weight(self) -> float:
        """Per-mode phase-space measure attached to one sample."""
        if self.kind == "quadrature":
            return self.dq * self.dtheta / math.pi
        return self.cell_area_z / math.pi

    def point_at(self, flat_index: int) -> tuple:
        """Per-mode points of the product element at a flat grid index."""
        if not 0 <= flat_index < self.cardinality:
            raise DomainError(f"flat index {flat_index} outside grid of size {self.cardinality}")
        per_mode = self.points_per_mode
        idx = []
        rem = flat_index
        for _ in range(self.modes):
            idx.append(rem % per_mode)
            rem //= per_mode
        idx.reverse()  # mode 1 is the slow index
        points = []
        for i in idx:
            if self.kind == "quadrature":
                qi, ti = divmod(i, len(self.theta_values))
                points.append(QuadraturePoint(self.q_values[qi], self.theta_values[ti]))
            else:
                points.append(CoherentPoint(complex(self.z_values[i])))
        return tuple(points)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind, "modes": self.modes,
            "q_values": list(self.q_values), "theta_values": list(self.theta_values),
            "z_values": list(self.z_values), "z_im_width": self.z_im_width,
        }

    @classmethod
    def from_json_dict(cls, data) -> "SamplingGrid":
        return cls(kind=data["kind"], modes=int(data["modes"]),
                   q_values=tuple(data.get("q_values", ())),
                   theta_values=tuple(data.get("theta_values", ())),
                   z_values=tuple(data.get("z_values", ())),
                   z_im_width=data.get("z_im_width"))


# --------------------------------------------------------------------------
# element construction
# --------------------------------------------------------------------------

def quadrature_vector(point: QuadraturePoint, trunc: TruncationConfig) -> np.ndarray:
    """Truncated rotated-quadrature eigenvector, component n = psi_n(q) e^{-in theta}.

    The component array is the conjugate of <n|q_theta> for the convention
    |q_theta> = exp(i theta a^dag a) |q>; at theta = 0 it is real.
    """
    psis = hermite_basis(trunc.cutoff_n, np.asarray(point.q, dtype=float))
    phases = np.exp(-1j * point.theta * np.arange(trunc.dim))
    return psis.astype(complex) * phases


def _on_axis(value: float, axis: Sequence[float]) -> bool:
    return any(abs(value - a) <= GRID_MATCH_TOL for a in axis)


def _product_projector(kets: Sequence[np.ndarray]) -> np.ndarray:
    ket = kets[0]
    for v in kets[1:]:
        ket = np.kron(ket, v)
    return np.outer(ket, ket.conj())


def quadrature_element(points: Sequence[QuadraturePoint], grid: SamplingGrid,
                       trunc: TruncationConfig, element_id: str | None = None) -> POVMElement:
    """Weighted projector onto the product rotated-quadrature vector."""
    if grid.kind != "quadrature":
        raise DomainError("quadrature_element needs a quadrature grid")
    points = tuple(points)
    if len(points) != trunc.modes:
        raise DimensionMismatchError(f"got {len(points)} points for {trunc.modes} modes")
    for pt in points:
        if not _on_axis(pt.q, grid.q_values) or not _on_axis(pt.theta, grid.theta_values):
            raise DomainError(f"point {pt} does not lie on the sampling grid")
    single = TruncationConfig(trunc.cutoff_n, 1)
    kets = [np.conj(quadrature_vector(pt, single)) for pt in points]
    weight = grid.mode_weight() ** trunc.modes
    name = element_id if element_id is not None else _coords_id("quad", points)
    return POVMElement(id=name, matrix=_product_projector(kets), weight=weight,
                       coords=points, kind="quadrature")


def coherent_element(points: Sequence[CoherentPoint], grid: SamplingGrid,
                     trunc: TruncationConfig, element_id: str | None = None) -> POVMElement:
    """Weighted projector onto the truncated product coherent state."""
    if grid.kind != "coherent":
        raise DomainError("coherent_element needs a coherent grid")
    points = tuple(points)
    if len(points) != trunc.modes:
        raise DimensionMismatchError(f"got {len(points)} points for {trunc.modes} modes")
    kets = [coherent_amplitudes(trunc.cutoff_n, pt.z) for pt in points]
    weight = grid.mode_weight() ** trunc.modes
    name = element_id if element_id is not None else _coords_id("coh", points)
    return POVMElement(id=name, matrix=_product_projector(kets), weight=weight,
                       coords=points, kind="coherent")


def _coords_id(prefix: str, points: tuple) -> str:
    parts = []
    for pt in points:
        if isinstance(pt, QuadraturePoint):
            parts.append(f"q{pt.q:+.6f}t{pt.theta:+.6f}")
        else:
            parts.append(f"z{pt.z.real:+.6f}{pt.z.imag:+.6f}j")
    return prefix + ":" + ";".join(parts)


def elements_from_grid(grid: SamplingGrid, trunc: TruncationConfig,
                       indices: Iterable[int] | None = None) -> list[POVMElement]:
    """Materialize grid elements; ids carry the flat grid index for stable joins."""
    if trunc.modes != grid.modes:
        raise DimensionMismatchError(
            f"grid has {grid.modes} modes, truncation has {trunc.modes}")
    if indices is None:
        indices = range(grid.cardinality)
    build = quadrature_element if grid.kind == "quadrature" else coherent_element
    prefix = "quad" if grid.kind == "quadrature" else "coh"
    out = []
    for i in indices:
        pts = grid.point_at(int(i))
        out.append(build(pts, grid, trunc, element_id=f"{prefix}-{int(i):06d}"))
    return out


def completeness_residual(elements: Sequence[POVMElement], trunc: TruncationConfig,
                          enforce_bound: bool = True) -> float:
    """Spectral norm of I - sum_i w_i E_i over the truncated space.

    Also enforces the operator-sum bound sum w E <= 1.05 I needed for the
    maximum-entropy slack to stay meaningful; violations raise
    CompletenessError unless enforce_bound is False.
    """
    if not elements:
        raise DomainError("completeness_residual needs at least one element")
    dim = trunc.total_dim
    total = np.zeros((dim, dim), dtype=complex)
    for el in elements:
        if el.matrix.shape[0] != dim:
            raise DimensionMismatchError(
                f"element {el.id} has dimension {el.matrix.shape[0]}, expected {dim}")
        total += el.weight * el.matrix
    gap_eigs = np.linalg.eigvalsh(np.eye(dim) - total)
    if enforce_bound and gap_eigs[0] < -(OPERATOR_SUM_BOUND - 1.0):
        raise CompletenessError(
            f"operator sum exceeds {OPERATOR_SUM_BOUND} I "
            f"(min eig of I - sum = {gap_eigs[0]:.4f})")
    return float(np.max(np.abs(gap_eigs)))


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------

def save_povm(path, elements: Sequence[POVMElement], grid: SamplingGrid,
              trunc: TruncationConfig, materialize: bool = False) -> None:
    """Write a POVM set as JSON; matrices included only when materialize=True."""
    items = []
    for el in elements:
        item = {"id": el.id, "kind": el.kind, "weight": el.weight,
                "coords": _coords_json(el.coords)}
        if materialize:
            item["matrix"] = {"re": el.matrix.real.reshape(-1).tolist(),
                              "im": el.matrix.imag.reshape(-1).tolist()}
        items.append(item)
    doc = {
        "header": {
            "grid": grid.to_json_dict(),
            "cutoff_n": trunc.cutoff_n,
            "modes": trunc.modes,
            "weight_rule": ("dq*dtheta/pi per mode" if grid.kind == "quadrature"
                            else f"d2z/pi per mode, d2z={grid.cell_area_z!r}"),
            "materialized": bool(materialize),
        },
        "elements": items,
    }
    Path(path).write_text(json.dumps(doc))


def load_povm(path) -> tuple[list[POVMElement], SamplingGrid, TruncationConfig]:
    """Read a POVM set; regenerates matrices from coordinates when absent."""
    doc = json.loads(Path(path).read_text())
    header = doc["header"]
    grid = SamplingGrid.from_json_dict(header["grid"])
    trunc = TruncationConfig(cutoff_n=int(header["cutoff_n"]), modes=int(header["modes"]))
    elements = []
    for item in doc["elements"]:
        coords = _coords_from_json(item["kind"], item["coords"])
        if "matrix" in item:
            dim = trunc.total_dim
            mat = (np.asarray(item["matrix"]["re"], dtype=float)
                   + 1j * np.asarray(item["matrix"]["im"], dtype=float)).reshape(dim, dim)
            elements.append(POVMElement(id=item["id"], matrix=mat,
                                        weight=float(item["weight"]),
                                        coords=coords, kind=item["kind"]))
        else:
            build = quadrature_element if item["kind"] == "quadrature" else coherent_element
            el = build(coords, grid, trunc, element_id=item["id"])
            elements.append(el)
    return elements, grid, trunc


def _coords_json(coords: tuple) -> list:
    out = []
    for pt in coords:
        if isinstance(pt, QuadraturePoint):
            out.append({"q": pt.q, "theta": pt.theta})
        else:
            out.append({"z_re": pt.z.real, "z_im": pt.z.imag})
    return out


def _coords_from_json(kind: str, data: list) -> tuple:
    if kind == "quadrature":
        return tuple(QuadraturePoint(float(d["q"]), float(d["theta"])) for d in data)
    return tuple(CoherentPoint(complex(float(d["z_re"]), float(d.get("z_im", 0.0))))
                 for d in data)

from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from classical import RegionSpec
from constants import SCHEMA_VERSION
from errors import ConfigError, EmptyRegionError
from harness.constants import GRID_AXES, CriterionStatus, InitialKind, Scenario
from model import ClassicalState, Family, ModelParams, fixed_points


class InitialStateSpec(BaseModel):
    """Where a run starts: a coherent centre, a named fixed point, or an ensemble region."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: InitialKind = Field(default=InitialKind.COHERENT, description="Kind of initial condition.")
    z1: float = Field(default=0.0, ge=-1.0, le=1.0, description="Imbalance of species 1 (coherent).")
    phi1: float = Field(default=0.0, description="Phase of species 1 (coherent).")
    z2: float = Field(default=0.0, ge=-1.0, le=1.0, description="Imbalance of species 2 (coherent).")
    phi2: float = Field(default=0.0, description="Phase of species 2 (coherent).")
    family: Optional[Family] = Field(default=None, description="Fixed-point family (fixed-point).")
    branch: int = Field(default=0, description="Fixed-point branch, e.g. -1 or +1 for FP-III.")
    region: Optional[RegionSpec] = Field(default=None, description="Ensemble region (region).")

    @model_validator(mode="after")
    def _complete(self) -> InitialStateSpec:
        if self.kind is InitialKind.FIXED_POINT and self.family is None:
            raise ValueError("a fixed-point initial state needs 'family'")
        if self.kind is InitialKind.REGION and self.region is None:
            raise ValueError("a region initial state needs 'region'")
        return self

    def resolve(self, params: ModelParams) -> ClassicalState:
        """Centre of the initial condition in canonical coordinates.

        Raises:
            ConfigError: If the requested fixed point does not exist for ``params``.
        """
        if self.kind is InitialKind.FIXED_POINT:
            for point in fixed_points(params):
                if point.family is self.family and point.branch == self.branch:
                    return point.location
            raise ConfigError(
                f"fixed point {self.family.value} (branch {self.branch}) does not exist at these parameters",
                [f"initial.family: {self.family.value}", f"initial.branch: {self.branch}"],
            )
        if self.kind is InitialKind.REGION:
            region = self.region
            z = 0.5 * (region.z_min + region.z_max)
            phi = 0.5 * (region.phi_min + region.phi_max)
            return ClassicalState(z1=z, phi1=phi, z2=z, phi2=phi)
        return ClassicalState(z1=self.z1, phi1=self.phi1, z2=self.z2, phi2=self.phi2)


class RunParams(BaseModel):
    """Numerical settings shared by all scenarios; each pipeline reads the ones it needs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(ge=0, description="64-bit master seed.")
    t_max: float = Field(default=100.0, gt=0.0, description="Final time in units of 1/J.")
    output_dt: float = Field(default=0.1, gt=0.0, description="Spacing of recorded samples.")
    dt: float = Field(default=1e-3, gt=0.0, description="Fixed step of stochastic integrators.")
    tol: float = Field(default=1e-10, gt=0.0, description="Relative tolerance of adaptive integrators.")
    n_samples: int = Field(default=500, ge=2, description="TWA samples per centre.")
    n_traj: int = Field(default=200, ge=1, description="Quantum trajectories.")
    epsilon: float = Field(default=1e-6, gt=0.0, description="Decorrelator separation.")
    lyapunov_time: float = Field(default=2000.0, gt=0.0, description="Integration time of Lyapunov estimates.")
    lyapunov_discard: float = Field(default=50.0, ge=0.0, description="Transient excluded from Lyapunov averages.")
    renormalization_interval: float = Field(default=1.0, gt=0.0, description="Tangent renormalization interval.")
    snapshot_times: List[float] = Field(default_factory=list, description="Times of persisted density matrices.")
    husimi_grid: List[int] = Field(default=[101, 100], description="(n_z, n_φ) of Husimi maps.")
    bifurcation_V: List[float] = Field(default_factory=list, description="V values of a bifurcation diagram.")
    dwell: bool = Field(default=False, description="Measure FP-IV dwell times (TWA).")
    rates: bool = Field(default=True, description="Measure fluctuation and decorrelator rates (TWA).")
    sectors: List[int] = Field(default=[1], description="Exchange sectors analysed (Liouvillian).")

    @model_validator(mode="after")
    def _consistent(self) -> RunParams:
        if self.output_dt > self.t_max:
            raise ValueError("output_dt must not exceed t_max")
        if len(self.husimi_grid) != 2 or min(self.husimi_grid) < 2:
            raise ValueError("husimi_grid needs two sizes of at least 2")
        if any(sector not in (1, -1) for sector in self.sectors):
            raise ValueError("sectors must be +1 or -1")
        return self

    def time_grid(self) -> List[float]:
        count = int(round(self.t_max / self.output_dt))
        return [index * self.output_dt for index in range(count + 1)]


class GridAxes(BaseModel):
    """Cartesian product of parameter values; unlisted parameters keep the model value."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    V: Optional[List[float]] = Field(default=None, description="Interaction values.")
    gamma: Optional[List[float]] = Field(default=None, description="Dissipation values.")
    omega_z: Optional[List[float]] = Field(default=None, description="Tilt values.")
    S: Optional[List[float]] = Field(default=None, description="Spin magnitudes.")

    @model_validator(mode="after")
    def _non_empty(self) -> GridAxes:
        axes = self.axes()
        if not axes:
            raise ValueError("grid needs at least one axis")
        for name, values in axes.items():
            if not values:
                raise ValueError(f"grid axis '{name}' is empty")
        return self

    def axes(self) -> Dict[str, List[float]]:
        return {name: getattr(self, name) for name in GRID_AXES if getattr(self, name) is not None}

    def points(self) -> Iterator[Dict[str, float]]:
        axes = self.axes()
        for values in itertools.product(*axes.values()):
            yield dict(zip(axes.keys(), values))

    def size(self) -> int:
        total = 1
        for values in self.axes().values():
            total *= len(values)
        return total


class ExperimentConfig(BaseModel):
    """A complete, versioned description of one run or sweep."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: int = Field(default=SCHEMA_VERSION, description="Config schema version.")
    name: str = Field(default="experiment", description="Label used for the output directory.")
    scenario: Scenario = Field(description="Pipeline to run.")
    model: ModelParams = Field(default_factory=ModelParams, description="Model couplings.")
    initial: InitialStateSpec = Field(default_factory=InitialStateSpec, description="Initial condition.")
    run: RunParams = Field(description="Numerical settings.")
    grid: Optional[GridAxes] = Field(default=None, description="Sweep axes.")
    output_dir: Optional[str] = Field(default=None, description="Result directory.")

    @model_validator(mode="after")
    def _supported_version(self) -> ExperimentConfig:
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}, expected {SCHEMA_VERSION}")
        return self

    @classmethod
    def parse(cls, data: Dict[str, Any], source: str = "config") -> ExperimentConfig:
        """Validates a raw mapping.

        Raises:
            ConfigError: Listing every offending field path.
        """
        try:
            return cls.model_validate(data)
        except ValidationError as error:
            raise ConfigError.from_pydantic(error, source) from error
        except EmptyRegionError as error:
            raise ConfigError(f"Invalid {source}: {error}", ["initial.region: empty"]) from error

    @classmethod
    def load(cls, path: Union[str, Path]) -> ExperimentConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as error:
            raise ConfigError(f"Cannot read config {path}: {error}") from error
        return cls.parse(data, source=str(path))

    def with_overrides(
        self, seed: Optional[int] = None, output_dir: Optional[str] = None
    ) -> ExperimentConfig:
        run = self.run if seed is None else self.run.model_copy(update={"seed": seed})
        return self.model_copy(update={"run": run, "output_dir": output_dir or self.output_dir})


class FileRecord(BaseModel):
    path: str = Field(description="Path relative to the result directory.")
    sha256: str = Field(description="Hex digest of the file contents.")
    bytes: int = Field(description="File size.")


class ResultManifest(BaseModel):
    """Provenance record written next to every result set."""

    config: Dict[str, Any] = Field(description="Fully resolved configuration.")
    version: str = Field(description="Installed package version.")
    files: List[FileRecord] = Field(default_factory=list, description="Result files with checksums.")
    wall_seconds: float = Field(description="Wall-clock duration.")
    workers: int = Field(description="Worker count.")
    seed_lineage: Dict[str, Any] = Field(description="Master seed and the stream tags derived from it.")
    status: str = Field(default="completed", description="'completed' or 'failed'.")
    error: Optional[str] = Field(default=None, description="Failure message when status is 'failed'.")


class CriterionResult(BaseModel):
    name: str = Field(description="Short criterion label.")
    measured: str = Field(description="Measured value(s).")
    expected: str = Field(description="Expected value or bound.")
    status: CriterionStatus = Field(description="Outcome.")
    seconds: float = Field(default=0.0, description="Runtime.")
    detail: Optional[str] = Field(default=None, description="Extra context, e.g. an exception message.")

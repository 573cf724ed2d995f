"""Sample-set container, factorial generation and serialization.

A ``SampleSet`` stores all encoded samples as contiguous float32 arrays
plus integer metadata columns. Generation walks a scenario list, draws
each scenario's management from its own seed, runs the crop simulator
and encodes the result; output order always follows scenario order, also
when simulating on several worker processes.

The binary file layout is little-endian: a fixed header (magic, version,
sample count, block shapes) followed by the row-major float32 blocks and
the int32 metadata columns. A CSV export with the metadata, scalar inputs
and target is provided for inspection.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from cropmeta.cropsim.simulation import DEFAULT_PARAMS, SimParams, run_simulation
from cropmeta.cropsim.types import (
    PEAT_CODE_RANGE,
    SAND_CODE_RANGE,
    SoilType,
)
from cropmeta.datagen.encode import (
    SCALAR_FIELDS,
    SOIL_CHANNELS,
    SOIL_DEPTH_CM,
    TEMPORAL_CHANNELS,
    TEMPORAL_LENGTH,
    Sample,
    encode_sample,
)
from cropmeta.datagen.management import sample_management
from cropmeta.datagen.scenarios import Scenario
from cropmeta.errors import DataFormatError, ValidationError

DATASET_MAGIC = b"AGDS"
DATASET_VERSION = 1

_HEADER = struct.Struct("<4sHIHHHHH")


@dataclass(frozen=True)
class SampleSet:
    """Columnar batch of encoded samples."""

    temporal: np.ndarray   # (n, 6, 210) float32
    scalars: np.ndarray    # (n, 3) float32
    soil: np.ndarray       # (n, 7, 120) float32
    targets: np.ndarray    # (n,) float32
    location: np.ndarray   # (n,) int32
    year: np.ndarray       # (n,) int32
    soil_code: np.ndarray  # (n,) int32

    def __post_init__(self):
        n = len(self.targets)
        expect = {
            "temporal": (n, len(TEMPORAL_CHANNELS), TEMPORAL_LENGTH),
            "scalars": (n, len(SCALAR_FIELDS)),
            "soil": (n, len(SOIL_CHANNELS), SOIL_DEPTH_CM),
            "targets": (n,),
            "location": (n,),
            "year": (n,),
            "soil_code": (n,),
        }
        for name, shape in expect.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValidationError(f"{name} must have shape {shape}, got {arr.shape}")

    def __len__(self) -> int:
        return len(self.targets)

    def subset(self, indices) -> "SampleSet":
        idx = np.asarray(indices)
        return SampleSet(
            temporal=self.temporal[idx],
            scalars=self.scalars[idx],
            soil=self.soil[idx],
            targets=self.targets[idx],
            location=self.location[idx],
            year=self.year[idx],
            soil_code=self.soil_code[idx],
        )

    def sample(self, i: int) -> Sample:
        """Materialise row ``i`` as a standalone Sample."""
        return Sample(
            temporal=self.temporal[i].astype(np.float64),
            scalars=self.scalars[i].astype(np.float64),
            soil=self.soil[i].astype(np.float64),
            target=float(self.targets[i]),
            location_id=int(self.location[i]),
            year=int(self.year[i]),
            soil_code=int(self.soil_code[i]),
        )

    @staticmethod
    def from_samples(samples: Sequence[Sample]) -> "SampleSet":
        if not samples:
            raise ValidationError("cannot build a SampleSet from zero samples")
        return SampleSet(
            temporal=np.stack([s.temporal for s in samples]).astype(np.float32),
            scalars=np.stack([s.scalars for s in samples]).astype(np.float32),
            soil=np.stack([s.soil for s in samples]).astype(np.float32),
            targets=np.array([s.target for s in samples], dtype=np.float32),
            location=np.array([s.location_id for s in samples], dtype=np.int32),
            year=np.array([s.year for s in samples], dtype=np.int32),
            soil_code=np.array([s.soil_code for s in samples], dtype=np.int32),
        )


def merge_sample_sets(parts: Sequence[SampleSet]) -> SampleSet:
    """Concatenate sample sets, preserving order of parts."""
    if not parts:
        raise ValidationError("cannot merge zero sample sets")
    return SampleSet(
        temporal=np.concatenate([p.temporal for p in parts]),
        scalars=np.concatenate([p.scalars for p in parts]),
        soil=np.concatenate([p.soil for p in parts]),
        targets=np.concatenate([p.targets for p in parts]),
        location=np.concatenate([p.location for p in parts]),
        year=np.concatenate([p.year for p in parts]),
        soil_code=np.concatenate([p.soil_code for p in parts]),
    )


def split_by_soil_domain(data: SampleSet) -> tuple[SampleSet, SampleSet]:
    """Disjoint (peat, sand) partition by soil code range."""
    codes = data.soil_code
    peat = (codes >= PEAT_CODE_RANGE[0]) & (codes <= PEAT_CODE_RANGE[1])
    sand = (codes >= SAND_CODE_RANGE[0]) & (codes <= SAND_CODE_RANGE[1])
    unknown = ~(peat | sand)
    if unknown.any():
        bad = sorted(set(codes[unknown].tolist()))
        raise ValidationError(f"soil codes outside both domains: {bad}")
    return data.subset(np.flatnonzero(peat)), data.subset(np.flatnonzero(sand))


def exclude_years(data: SampleSet, years: Iterable[int]) -> SampleSet:
    """Drop every sample whose year is in ``years``."""
    banned = set(int(y) for y in years)
    keep = np.array([int(y) not in banned for y in data.year])
    return data.subset(np.flatnonzero(keep))


def _simulate_one(args) -> Sample:
    scenario, weather_store, soil, params = args
    weather = weather_store.get(scenario.location_id, scenario.year)
    rng = np.random.default_rng(scenario.rng_seed)
    mgmt = sample_management(rng)
    result = run_simulation(weather, soil, mgmt, params)
    return encode_sample(weather, soil, mgmt, result.fresh_yield)


def generate_dataset(
    scenarios: Sequence[Scenario],
    weather_store,
    soils: Mapping[int, SoilType] | Sequence[SoilType],
    params: SimParams = DEFAULT_PARAMS,
    workers: int = 1,
) -> SampleSet:
    """Simulate and encode every scenario, in scenario order."""
    if not scenarios:
        raise ValidationError("cannot generate a dataset from zero scenarios")
    if not isinstance(soils, Mapping):
        soils = {s.code: s for s in soils}
    jobs = []
    for sc in scenarios:
        soil = soils.get(sc.soil_code)
        if soil is None:
            raise ValidationError(
                f"no soil with code {sc.soil_code} for scenario "
                f"(location {sc.location_id}, year {sc.year}, replicate {sc.replicate})")
        if not weather_store.has(sc.location_id, sc.year):
            raise ValidationError(
                f"no weather for location {sc.location_id}, year {sc.year} "
                f"(soil {sc.soil_code}, replicate {sc.replicate})")
        jobs.append((sc, weather_store, soil, params))
    if workers > 1:
        with Pool(processes=workers) as pool:
            samples = pool.map(_simulate_one, jobs, chunksize=64)
    else:
        samples = [_simulate_one(job) for job in jobs]
    return SampleSet.from_samples(samples)


def save_dataset(data: SampleSet, path: str | Path) -> None:
    """Write the binary single-file format (little-endian float32/int32)."""
    path = Path(path)
    header = _HEADER.pack(
        DATASET_MAGIC, DATASET_VERSION, len(data),
        len(TEMPORAL_CHANNELS), TEMPORAL_LENGTH,
        len(SCALAR_FIELDS), len(SOIL_CHANNELS), SOIL_DEPTH_CM,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(data.temporal, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(data.scalars, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(data.soil, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(data.targets, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(data.location, dtype="<i4").tobytes())
        fh.write(np.ascontiguousarray(data.year, dtype="<i4").tobytes())
        fh.write(np.ascontiguousarray(data.soil_code, dtype="<i4").tobytes())


def load_dataset(path: str | Path) -> SampleSet:
    """Read the binary format back; raises DataFormatError on corruption."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise DataFormatError(f"file too short for a dataset header ({len(raw)} bytes)",
                              path=path)
    magic, version, n, t_ch, t_len, s_len, g_ch, g_depth = _HEADER.unpack_from(raw, 0)
    if magic != DATASET_MAGIC:
        raise DataFormatError(f"bad magic {magic!r}, expected {DATASET_MAGIC!r}", path=path)
    if version != DATASET_VERSION:
        raise DataFormatError(
            f"unsupported dataset version {version} (supported: {DATASET_VERSION})",
            path=path)
    counts = (n * t_ch * t_len, n * s_len, n * g_ch * g_depth, n, n, n, n)
    sizes = tuple(c * 4 for c in counts)
    expected = _HEADER.size + sum(sizes)
    if len(raw) != expected:
        raise DataFormatError(
            f"truncated or padded dataset: {len(raw)} bytes, expected {expected}",
            path=path)
    offset = _HEADER.size
    blocks = []
    for count, size, dtype in zip(counts, sizes,
                                  ("<f4", "<f4", "<f4", "<f4", "<i4", "<i4", "<i4")):
        blocks.append(np.frombuffer(raw, dtype=dtype, count=count, offset=offset))
        offset += size
    return SampleSet(
        temporal=blocks[0].reshape(n, t_ch, t_len).copy(),
        scalars=blocks[1].reshape(n, s_len).copy(),
        soil=blocks[2].reshape(n, g_ch, g_depth).copy(),
        targets=blocks[3].copy(),
        location=blocks[4].copy(),
        year=blocks[5].copy(),
        soil_code=blocks[6].copy(),
    )


def export_dataset_csv(data: SampleSet, path: str | Path) -> None:
    """Inspection CSV: metadata columns, scalar inputs and target."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("location,year,soil_code," + ",".join(SCALAR_FIELDS) + ",target\n")
        for i in range(len(data)):
            scal = ",".join(repr(float(v)) for v in data.scalars[i])
            fh.write(f"{int(data.location[i])},{int(data.year[i])},"
                     f"{int(data.soil_code[i])},{scal},{repr(float(data.targets[i]))}\n")

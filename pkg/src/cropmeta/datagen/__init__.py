"""Synthetic data generation: weather, soils, management, factorial datasets."""

from cropmeta.datagen.weather import (
    DEFAULT_N_LOCATIONS,
    DEFAULT_YEARS,
    CsvWeatherStore,
    SyntheticWeatherStore,
    export_weather_csv_dir,
    generate_weather,
)
from cropmeta.datagen.soils import (
    N_PER_FAMILY,
    make_peat_soil,
    make_sand_soil,
    soil_by_code,
    soil_library,
)
from cropmeta.datagen.management import sample_management
from cropmeta.datagen.scenarios import Scenario, build_factorial, scenario_seed
from cropmeta.datagen.encode import (
    SCALAR_FIELDS,
    SOIL_CHANNELS,
    SOIL_DEPTH_CM,
    TEMPORAL_CHANNELS,
    TEMPORAL_LENGTH,
    TEMPORAL_WINDOW,
    Sample,
    encode_sample,
    encode_scalars,
    encode_soil,
    encode_temporal,
)
from cropmeta.datagen.normalize import Normalizer
from cropmeta.datagen.dataset import (
    DATASET_MAGIC,
    DATASET_VERSION,
    SampleSet,
    exclude_years,
    export_dataset_csv,
    generate_dataset,
    load_dataset,
    merge_sample_sets,
    save_dataset,
    split_by_soil_domain,
)

__all__ = [
    "DEFAULT_N_LOCATIONS", "DEFAULT_YEARS", "CsvWeatherStore",
    "SyntheticWeatherStore", "export_weather_csv_dir", "generate_weather",
    "N_PER_FAMILY", "make_peat_soil", "make_sand_soil", "soil_by_code",
    "soil_library", "sample_management", "Scenario", "build_factorial",
    "scenario_seed", "SCALAR_FIELDS", "SOIL_CHANNELS", "SOIL_DEPTH_CM",
    "TEMPORAL_CHANNELS", "TEMPORAL_LENGTH", "TEMPORAL_WINDOW", "Sample",
    "encode_sample", "encode_scalars", "encode_soil", "encode_temporal",
    "Normalizer", "DATASET_MAGIC", "DATASET_VERSION", "SampleSet",
    "exclude_years", "export_dataset_csv", "generate_dataset", "load_dataset",
    "merge_sample_sets", "save_dataset", "split_by_soil_domain",
]

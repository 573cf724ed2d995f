"""Command-line interface.

Subcommands: ``simulate``, ``generate``, ``pretrain``, ``finetune``,
``evaluate`` and ``experiment {transfer,pseudo-real}``. Every command
that involves randomness requires ``--seed``; nothing is ever seeded
from the clock. Exit codes: 0 success, 1 validation or input error,
2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from cropmeta import __version__
from cropmeta.baselines import build_data_driven_baseline
from cropmeta.cropsim.io import (
    read_management_json,
    read_soil_json,
    read_weather_csv,
)
from cropmeta.cropsim.simulation import run_simulation
from cropmeta.datagen.dataset import (
    exclude_years,
    export_dataset_csv,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from cropmeta.datagen.scenarios import build_factorial
from cropmeta.datagen.soils import soil_by_code, soil_library
from cropmeta.datagen.weather import (
    DEFAULT_N_LOCATIONS,
    DEFAULT_YEARS,
    CsvWeatherStore,
    SyntheticWeatherStore,
)
from cropmeta.errors import (
    CropMetaError,
    DataFormatError,
    ExperimentError,
    ModelFileError,
    TrainingError,
    ValidationError,
)
from cropmeta.experiments.pseudoreal import (
    DEFAULT_PSEUDO_LOCATION,
    DEFAULT_PSEUDO_N,
    DEFAULT_PSEUDO_SOIL_CODE,
    DEFAULT_PSEUDO_YEARS,
    build_pseudo_observations,
    run_pseudo_real_experiment,
)
from cropmeta.experiments.reports import (
    svg_scatter,
    write_pseudo_real_csv,
    write_pseudo_real_json,
    write_transfer_csv,
    write_transfer_json,
)
from cropmeta.experiments.transfer import (
    TransferExperimentConfig,
    run_transfer_experiment,
)
from cropmeta.manifest import read_manifest, seed_mismatch_warning, write_manifest
from cropmeta.metrics import evaluate_predictions
from cropmeta.tensornet.modelio import Model, load_model, save_model
from cropmeta.tensornet.network import NetworkSpec, init_parameters
from cropmeta.training import (
    TrainConfig,
    fine_tune,
    report_to_csv,
    report_to_json,
    train,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

_TRAIN_CONFIG_KEYS = {
    "initial_lr", "es_min_delta", "es_patience", "lr_factor", "lr_min_delta",
    "lr_patience", "max_epochs", "batch_size", "val_fraction",
}


class _Parser(argparse.ArgumentParser):
    """argparse that exits with the validation code on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _parse_years(text: str) -> list[int]:
    """Year list syntax: "2001", "1989-2020", or comma-joined mix."""
    years: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if "-" in token[1:]:
            lo, hi = token.split("-", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValidationError(f"year range {token!r} is reversed")
            years.extend(range(lo, hi + 1))
        elif token:
            years.append(int(token))
    if not years:
        raise ValidationError(f"no years in {text!r}")
    return years


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(token) for token in text.split(",") if token.strip())
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from exc


def _require_exists(path: Path, what: str) -> Path:
    if not path.exists():
        raise ValidationError(f"{what} does not exist: {path}")
    return path


def _train_config(seed: int, args, config_path: str | None) -> TrainConfig:
    """TrainConfig from defaults, a JSON config file, and CLI overrides."""
    overrides: dict = {}
    if config_path:
        path = _require_exists(Path(config_path), "config file")
        with open(path, encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON: {exc}", path=path) from exc
        unknown = set(loaded) - _TRAIN_CONFIG_KEYS
        if unknown:
            raise ValidationError(
                f"unknown config keys {sorted(unknown)}; "
                f"supported: {sorted(_TRAIN_CONFIG_KEYS)}")
        overrides.update(loaded)
    if getattr(args, "max_epochs", None) is not None:
        overrides["max_epochs"] = args.max_epochs
    return TrainConfig(seed=seed, **overrides)


def _select_soils(selector: str):
    library = soil_library()
    if selector == "all":
        return library
    if selector == "peat":
        return [s for s in library if s.is_peat()]
    if selector == "sand":
        return [s for s in library if s.is_sand()]
    try:
        codes = [int(token) for token in selector.split(",") if token.strip()]
    except ValueError as exc:
        raise ValidationError(
            f"--soils must be 'all', 'peat', 'sand' or soil codes, got {selector!r}"
        ) from exc
    return [soil_by_code(code) for code in codes]


def _weather_store(args, seed: int):
    if getattr(args, "weather_dir", None):
        directory = _require_exists(Path(args.weather_dir), "weather directory")
        return CsvWeatherStore(directory)
    return SyntheticWeatherStore(master_seed=seed)


def _dataset_arrays(data, include_soil: bool):
    soil = data.soil if include_soil else None
    return data.temporal, data.scalars, soil


def cmd_simulate(args) -> int:
    weather_path = _require_exists(Path(args.weather), "weather file")
    soil_path = _require_exists(Path(args.soil), "soil file")
    mgmt_path = _require_exists(Path(args.management), "management file")

    stem = weather_path.stem.split("_")
    if len(stem) == 2 and stem[0].isdigit() and stem[1].isdigit():
        location_id, year = int(stem[0]), int(stem[1])
    else:
        location_id, year = 0, 2000
    weather = read_weather_csv(weather_path, location_id, year)
    soil = read_soil_json(soil_path)[0]
    mgmt = read_management_json(mgmt_path)

    result = run_simulation(weather, soil, mgmt, keep_trace=bool(args.trace))
    print(f"fresh yield [t/ha]: {repr(result.fresh_yield)}")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("doy,thermal_time,lai,soil_water_mm,tuber_dry_kg_ha,"
                     "n_available_kg_ha\n")
            for rec in result.daily_trace:
                fh.write(f"{rec.doy},{repr(rec.thermal_time)},{repr(rec.lai)},"
                         f"{repr(rec.soil_water_mm)},{repr(rec.tuber_dry_kg_ha)},"
                         f"{repr(rec.n_available_kg_ha)}\n")
    return EXIT_OK


def cmd_generate(args) -> int:
    years = _parse_years(args.years)
    soils = _select_soils(args.soils)
    store = _weather_store(args, args.seed)
    scenarios = build_factorial(args.seed, range(args.locations), years, soils,
                                args.replicates)
    data = generate_dataset(scenarios, store, soils, workers=args.workers)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(data, out)
    config = {
        "locations": args.locations,
        "years": years,
        "soils": [s.code for s in soils],
        "replicates": args.replicates,
        "weather_dir": args.weather_dir,
        "workers": args.workers,
    }
    write_manifest(out, "generate", args.seed, config)
    if args.export_csv:
        export_dataset_csv(data, args.export_csv)
    print(f"dataset: {len(data)} samples -> {out}")
    return EXIT_OK


def cmd_pretrain(args) -> int:
    data_path = _require_exists(Path(args.data), "dataset file")
    data = load_dataset(data_path)
    config = _train_config(args.seed, args, args.config)
    spec = NetworkSpec(include_soil=not args.no_soil_stream)
    params = init_parameters(spec, args.seed)
    best, report, normalizer = train(spec, params, data, config)
    model = Model(spec=spec, params=best, normalizer=normalizer)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, out)
    data_manifest = read_manifest(data_path)
    write_manifest(out, "pretrain", args.seed, {
        "data": str(data_path),
        "data_config_hash": None if data_manifest is None
        else data_manifest.get("config_hash"),
        "no_soil_stream": args.no_soil_stream,
        "train": dataclasses.asdict(config),
    })
    if args.report:
        report_to_csv(report, args.report + ".csv")
        report_to_json(report, args.report + ".json")
    print(f"pretrained: {report.epochs_run} epochs, best epoch "
          f"{report.best_epoch}, best val loss {report.best_val_loss!r} -> {out}")
    return EXIT_OK


def cmd_finetune(args) -> int:
    model_path = _require_exists(Path(args.model), "model file")
    data_path = _require_exists(Path(args.data), "dataset file")
    warning = seed_mismatch_warning({"model": model_path, "data": data_path})
    if warning:
        print(warning, file=sys.stderr)
    model = load_model(model_path)
    data = load_dataset(data_path)
    config = _train_config(args.seed, args, args.config)
    tuned, report = fine_tune(model, data, config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(tuned, out)
    write_manifest(out, "finetune", args.seed, {
        "model": str(model_path),
        "data": str(data_path),
        "train": dataclasses.asdict(config),
    })
    if args.report:
        report_to_csv(report, args.report + ".csv")
        report_to_json(report, args.report + ".json")
    print(f"fine-tuned: {report.epochs_run} epochs, best epoch "
          f"{report.best_epoch}, best val loss {report.best_val_loss!r} -> {out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model_path = _require_exists(Path(args.model), "model file")
    data_path = _require_exists(Path(args.data), "dataset file")
    warning = seed_mismatch_warning({"model": model_path, "data": data_path})
    if warning:
        print(warning, file=sys.stderr)
    model = load_model(model_path)
    data = load_dataset(data_path)
    temporal, scalars, soil = _dataset_arrays(data, model.spec.include_soil)
    predictions = model.predict(temporal, scalars, soil)
    report = evaluate_predictions(model_path.stem, data_path.stem,
                                  predictions, data.targets.astype(np.float64))
    r_text = "nan" if report.pearson_r is None else repr(report.pearson_r)
    print(f"rmse={repr(report.rmse)} r={r_text} n={report.n}")
    if args.out:
        doc = {
            "model_id": report.model_id,
            "dataset_id": report.dataset_id,
            "rmse": report.rmse,
            "pearson_r": report.pearson_r,
            "n": report.n,
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(args.out, "evaluate",
                       -1, {"model": str(model_path), "data": str(data_path)})
    if args.pairs:
        with open(args.pairs, "w", encoding="utf-8") as fh:
            fh.write("prediction,observation\n")
            for p, o in zip(report.predictions, report.observations):
                fh.write(f"{repr(p)},{repr(o)}\n")
    if args.scatter:
        svg_scatter(report.predictions, report.observations, args.scatter,
                    title=f"{report.model_id} on {report.dataset_id}")
    return EXIT_OK


def _generate_or_load(args, years: list[int]):
    if args.data:
        data_path = _require_exists(Path(args.data), "dataset file")
        return load_dataset(data_path)
    soils = soil_library()
    store = _weather_store(args, args.seed)
    scenarios = build_factorial(args.seed, range(args.locations), years, soils,
                                args.replicates)
    return generate_dataset(scenarios, store, soils, workers=args.workers)


def cmd_experiment_transfer(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    years = _parse_years(args.years)
    data = _generate_or_load(args, years)

    pre_cfg = TrainConfig(seed=0, max_epochs=args.max_epochs)
    ft_cfg = TrainConfig(seed=0, max_epochs=args.finetune_max_epochs)
    config = TransferExperimentConfig(
        pretrain_size=args.pretrain_size,
        holdout_size=args.holdout_size,
        finetune_sizes=_parse_int_list(args.finetune_sizes),
        seeds=_parse_int_list(args.seeds),
        split_seed=args.seed,
        pretrain_config=pre_cfg,
        finetune_config=ft_cfg,
    )
    result = run_transfer_experiment(data, config)
    write_transfer_csv(result, out_dir / "transfer_results.csv")
    write_transfer_json(result, out_dir / "transfer_summary.json")
    for model_id, (pred, obs) in sorted(result.scatter.items()):
        svg_scatter(pred, obs, out_dir / f"scatter_{model_id}.svg",
                    title=f"{model_id}, largest fine-tuning size")
    write_manifest(out_dir / "transfer_results.csv", "experiment transfer",
                   args.seed, {
                       "pretrain_size": args.pretrain_size,
                       "holdout_size": args.holdout_size,
                       "finetune_sizes": list(config.finetune_sizes),
                       "seeds": list(config.seeds),
                       "max_epochs": args.max_epochs,
                       "finetune_max_epochs": args.finetune_max_epochs,
                       "years": years,
                       "locations": args.locations,
                       "replicates": args.replicates,
                       "data": args.data,
                   })
    summary = result.summary()
    for model, sizes in summary["models"].items():
        towers = ", ".join(f"@{size}: {vals['mean_rmse']:.2f}"
                           for size, vals in sorted(sizes.items(), key=lambda kv: int(kv[0])))
        print(f"{model}: mean rmse {towers}")
    return EXIT_OK


def cmd_experiment_pseudo_real(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pseudo_years = set(DEFAULT_PSEUDO_YEARS)
    pretrain_years = [y for y in _parse_years(args.years) if y not in pseudo_years]
    if not pretrain_years:
        raise ValidationError("no pretraining years left after excluding "
                              "pseudo-observation years")

    soils = soil_library()
    store = _weather_store(args, args.seed)
    if args.data:
        data = load_dataset(_require_exists(Path(args.data), "dataset file"))
        data = exclude_years(data, pseudo_years)
    else:
        scenarios = build_factorial(args.seed, range(args.locations), pretrain_years,
                                    soils, args.replicates)
        data = generate_dataset(scenarios, store, soils, workers=args.workers)
    if len(data) > args.pretrain_size:
        order = np.random.default_rng(args.seed).permutation(len(data))
        data = data.subset(order[:args.pretrain_size])

    spec = NetworkSpec(include_soil=False)
    config = _train_config(args.seed, args, None)
    params = init_parameters(spec, args.seed)
    best, _, normalizer = train(spec, params, data, config)
    pretrained = Model(spec=spec, params=best, normalizer=normalizer)

    pseudo = build_pseudo_observations(
        args.seed, store, soil_by_code(args.soil_code),
        location_id=args.location, n=args.n_obs)
    result = run_pseudo_real_experiment(
        pretrained, set(int(y) for y in data.year), pseudo,
        seeds=_parse_int_list(args.seeds),
        finetune_config=TrainConfig(seed=0, max_epochs=args.finetune_max_epochs))

    write_pseudo_real_csv(result, out_dir / "pseudo_real_results.csv")
    write_pseudo_real_json(result, out_dir / "pseudo_real_summary.json")
    first_seed = _parse_int_list(args.seeds)[0]
    for model_id, seed in (("crop_model", None), ("metamodel", first_seed),
                           ("data_driven", first_seed), ("linear_regression", None)):
        pred = result.predictions[(model_id, seed)]
        svg_scatter(pred, result.observations,
                    out_dir / f"scatter_{model_id}.svg", title=model_id)
    write_manifest(out_dir / "pseudo_real_results.csv", "experiment pseudo-real",
                   args.seed, {
                       "pretrain_size": args.pretrain_size,
                       "seeds": list(_parse_int_list(args.seeds)),
                       "location": args.location,
                       "soil_code": args.soil_code,
                       "n_obs": args.n_obs,
                       "years": pretrain_years,
                       "locations": args.locations,
                       "replicates": args.replicates,
                       "max_epochs": args.max_epochs,
                       "finetune_max_epochs": args.finetune_max_epochs,
                       "data": args.data,
                   })
    summary = result.summary()
    for model, vals in summary["models"].items():
        print(f"{model}: rmse {vals['mean_rmse']:.2f} bias {vals['mean_bias']:+.2f}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="cropmeta",
                     description="Hybrid meta-modeling toolkit for potato yield "
                                 "prediction")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run the crop simulator on one scenario")
    p.add_argument("--weather", required=True, help="weather CSV file")
    p.add_argument("--soil", required=True, help="soil JSON file")
    p.add_argument("--management", required=True, help="management JSON file")
    p.add_argument("--trace", help="write a daily state CSV to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="simulate a factorial dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output dataset file")
    p.add_argument("--locations", type=int, default=DEFAULT_N_LOCATIONS)
    p.add_argument("--years", default=f"{DEFAULT_YEARS[0]}-{DEFAULT_YEARS[-1]}")
    p.add_argument("--soils", default="all",
                   help="'all', 'peat', 'sand', or comma-separated codes")
    p.add_argument("--replicates", type=int, default=2)
    p.add_argument("--weather-dir",
                   help="read weather CSVs from this directory instead of "
                        "generating synthetic weather")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--export-csv", help="also write an inspection CSV here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pretrain", help="train a fresh metamodel on a dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--no-soil-stream", action="store_true",
                   help="exclude the soil input stream")
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--config", help="JSON file with training overrides")
    p.add_argument("--report", help="write <prefix>.csv and <prefix>.json")
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("finetune", help="fine-tune a pretrained model")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--config", help="JSON file with training overrides")
    p.add_argument("--report", help="write <prefix>.csv and <prefix>.json")
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("evaluate", help="score a model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="write a JSON metric report here")
    p.add_argument("--pairs", help="write a prediction,observation CSV here")
    p.add_argument("--scatter", help="write an SVG scatter plot here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="run a full experiment pipeline")
    esub = p.add_subparsers(dest="experiment", required=True, parser_class=_Parser)

    t = esub.add_parser("transfer", help="peat-to-sand transfer grid")
    t.add_argument("--seed", type=int, required=True)
    t.add_argument("--out", required=True, help="output directory")
    t.add_argument("--data", help="reuse an existing dataset file")
    t.add_argument("--locations", type=int, default=DEFAULT_N_LOCATIONS)
    t.add_argument("--years", default=f"{DEFAULT_YEARS[0]}-{DEFAULT_YEARS[-1]}")
    t.add_argument("--replicates", type=int, default=12)
    t.add_argument("--workers", type=int, default=1)
    t.add_argument("--pretrain-size", type=int, default=10_000)
    t.add_argument("--holdout-size", type=int, default=17_000)
    t.add_argument("--finetune-sizes", default="50,200,1000")
    t.add_argument("--seeds", default="1,2,3")
    t.add_argument("--max-epochs", type=int, default=120)
    t.add_argument("--finetune-max-epochs", type=int, default=300)
    t.set_defaults(func=cmd_experiment_transfer)

    q = esub.add_parser("pseudo-real",
                        help="surrogate field-trial pipeline with LOOCV by year")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--out", required=True, help="output directory")
    q.add_argument("--data", help="reuse an existing dataset file (pseudo years "
                                  "are excluded automatically)")
    q.add_argument("--locations", type=int, default=DEFAULT_N_LOCATIONS)
    q.add_argument("--years", default=f"{DEFAULT_YEARS[0]}-{DEFAULT_YEARS[-1]}")
    q.add_argument("--replicates", type=int, default=2)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--pretrain-size", type=int, default=10_000)
    q.add_argument("--location", type=int, default=DEFAULT_PSEUDO_LOCATION)
    q.add_argument("--soil-code", type=int, default=DEFAULT_PSEUDO_SOIL_CODE)
    q.add_argument("--n-obs", type=int, default=DEFAULT_PSEUDO_N)
    q.add_argument("--seeds", default="1,2,3")
    q.add_argument("--max-epochs", type=int, default=120)
    q.add_argument("--finetune-max-epochs", type=int, default=300)
    q.set_defaults(func=cmd_experiment_pseudo_real)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DataFormatError, ModelFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (TrainingError, ExperimentError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except CropMetaError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

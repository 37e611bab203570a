"""
Benchmark subcommands: compare, dump-prior.
"""
import argparse
from typing import List

from pfnlab.adapters.mappers.config_mapper import ConfigMapper
from pfnlab.cli.commands.common import add_common_arguments, load_config, open_run_dir
from pfnlab.cli.dependencies import DependencyContainer
from pfnlab.core.models.dataset import SplitSpec
from pfnlab.core.models.errors import ConfigurationError
from pfnlab.core.models.scores import BenchDataset
from pfnlab.core.services.synthetic_tasks import make_synthetic_suite
from pfnlab.core.services.tabular_constraints import TabularConstraints
from pfnlab.schemas.experiment import BenchSection, ExperimentConfig

DEFAULT_PRIOR_DUMPS = 10


def register(subparsers) -> None:
    compare = subparsers.add_parser(
        "compare",
        help="compare variants across datasets",
        description="Run every bench variant on every bench dataset and write the normalized comparison report.",
    )
    add_common_arguments(compare)
    compare.add_argument("--checkpoint", default=None, help="pretrained checkpoint (default: bench.checkpoint)")
    compare.add_argument("--out", default=None, help="report directory (default: bench.output_dir or <run-dir>)")
    compare.set_defaults(handler=run_compare)

    dump = subparsers.add_parser(
        "dump-prior",
        help="write sampled prior datasets as CSV files",
        description="Sample datasets from the configured prior and write them as prior-NNN.csv.",
    )
    add_common_arguments(dump)
    dump.add_argument("--n", type=int, default=DEFAULT_PRIOR_DUMPS, help=f"number of datasets (default: {DEFAULT_PRIOR_DUMPS})")
    dump.add_argument("--out", default=None, help="output directory (default: <run-dir>)")
    dump.set_defaults(handler=run_dump_prior)


def collect_datasets(config: ExperimentConfig, bench: BenchSection, container: DependencyContainer) -> List[BenchDataset]:
    """Configured CSV datasets followed by the synthetic suite, if any."""
    datasets = []
    for spec in bench.datasets:
        source = ConfigMapper.to_dataset_source(spec.dataset, config.seed)
        dataset = container.dataset_repository.load(source.path, source.schema, source.task)
        datasets.append(BenchDataset(spec.id, dataset, split=source.split))
    if bench.synthetic_suite is not None:
        suite = bench.synthetic_suite
        datasets.extend(make_synthetic_suite(
            n_classification=suite.n_classification,
            n_regression=suite.n_regression,
            seed=config.seed if suite.seed is None else suite.seed,
            row_range=tuple(suite.row_range),
            feature_range=tuple(suite.feature_range),
            class_range=tuple(suite.class_range),
            mixed_fraction=suite.mixed_fraction,
        ))
    if not datasets:
        raise ConfigurationError("bench lists no datasets and no synthetic_suite")
    return datasets


def shared_split(config: ExperimentConfig) -> SplitSpec:
    """Split for datasets without their own: the top-level dataset section's, else the default."""
    if config.dataset is not None:
        return ConfigMapper.to_split_spec(config.dataset, config.seed)
    return SplitSpec(train_fraction=TabularConstraints.DEFAULT_TRAIN_FRACTION, seed=config.seed)


def run_compare(args: argparse.Namespace, leftovers: List[str], container: DependencyContainer) -> int:
    config = load_config(args, leftovers, container)
    if config.bench is None:
        raise ConfigurationError("'compare' needs a bench section in the config")
    bench = config.bench

    variants = ConfigMapper.to_variants(bench.variants, config.seed)
    train_configs = {}
    for section in bench.variants:
        train_config = ConfigMapper.variant_train_config(config, section)
        if train_config is not None:
            train_configs[section.name] = train_config
    run_dir = open_run_dir(args, container, "compare")
    run_dir.freeze_config(ConfigMapper.resolved(config))
    datasets = collect_datasets(config, bench, container)

    report = container.compare_variants_use_case.execute(
        datasets,
        variants,
        train_configs,
        model_config=ConfigMapper.to_model_config(config.model),
        checkpoint_path=args.checkpoint or bench.checkpoint,
        split=shared_split(config),
        validation_fraction=config.train.validation_fraction,
        output_dir=args.out or bench.output_dir or run_dir.path,
    )
    print(report.rendered, end="")
    return 0


def run_dump_prior(args: argparse.Namespace, leftovers: List[str], container: DependencyContainer) -> int:
    config = load_config(args, leftovers, container)
    prior_config = ConfigMapper.to_prior_config(config.prior, config.seed)
    run_dir = open_run_dir(args, container, "dump-prior")
    run_dir.freeze_config(ConfigMapper.resolved(config))

    paths = container.dump_prior_use_case.execute(prior_config, args.n, args.out or run_dir.path)
    for path in paths:
        print(path)
    return 0

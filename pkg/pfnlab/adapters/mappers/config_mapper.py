"""
Config mapper.
Converts validated config sections into domain configs, and experiment
configs into their resolved, frozen form.
"""
from typing import Any, Dict, List, Optional, Tuple

from pfnlab.core.models.dataset import ColumnSchema, DatasetSource, SplitSpec, TaskKind
from pfnlab.core.models.errors import ConfigurationError
from pfnlab.core.models.inference import InferenceConfig
from pfnlab.core.models.scores import VariantMethod, VariantSpec
from pfnlab.core.models.training import PriorConfig, TrainConfig, TrainRegime
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.schemas.experiment import (
    DatasetSection,
    ExperimentConfig,
    InferenceSection,
    ModelSection,
    PriorSection,
    TrainSection,
    VariantSection,
)


def _domain(factory, **values):
    """Build a domain config, surfacing its validation as a configuration error."""
    try:
        return factory(**values)
    except ValueError as error:
        raise ConfigurationError(f"{factory.__name__}: {error}") from error


def _seed(section_seed: Optional[int], global_seed: int) -> int:
    return global_seed if section_seed is None else section_seed


class ConfigMapper:

    @staticmethod
    def to_schema(section: DatasetSection) -> Tuple[ColumnSchema, ...]:
        return tuple(ColumnSchema(column.name, column.kind, column.target) for column in section.columns)

    @staticmethod
    def to_split_spec(section: DatasetSection, global_seed: int) -> SplitSpec:
        return _domain(SplitSpec, train_fraction=section.train_fraction, seed=_seed(section.split_seed, global_seed))

    @classmethod
    def to_dataset_source(cls, section: DatasetSection, global_seed: int) -> DatasetSource:
        return DatasetSource(
            path=section.path,
            schema=cls.to_schema(section),
            task=section.task,
            split=cls.to_split_spec(section, global_seed),
        )

    @staticmethod
    def to_model_config(section: ModelSection, task: TaskKind = TaskKind.CLASSIFICATION) -> ModelConfig:
        return _domain(ModelConfig, task=task, **section.model_dump())

    @staticmethod
    def to_prior_config(section: PriorSection, global_seed: int) -> PriorConfig:
        values = section.model_dump(exclude={"support_fraction", "seed"})
        for key in ("feature_count_range", "class_count_range", "latent_width_range", "mixture_components_range"):
            values[key] = tuple(values[key])
        return _domain(PriorConfig, seed=_seed(section.seed, global_seed), **values)

    @staticmethod
    def to_train_config(
        section: TrainSection,
        regime: TrainRegime,
        global_seed: int,
        learning_rate: Optional[float] = None,
        weight_decay: Optional[float] = None,
    ) -> TrainConfig:
        values = section.model_dump(exclude={"seed", "validation_fraction", "learning_rate", "weight_decay"})
        return _domain(
            TrainConfig,
            regime=regime,
            seed=_seed(section.seed, global_seed),
            learning_rate=learning_rate if learning_rate is not None else section.learning_rate,
            weight_decay=weight_decay if weight_decay is not None else section.weight_decay,
            **values,
        )

    @staticmethod
    def to_inference_config(section: InferenceSection, global_seed: int) -> InferenceConfig:
        values = section.model_dump(exclude={"seed"})
        return _domain(InferenceConfig, seed=_seed(section.seed, global_seed), **values)

    @classmethod
    def to_variants(cls, sections: List[VariantSection], global_seed: int) -> List[VariantSpec]:
        return [
            VariantSpec(
                name=section.name,
                method=VariantMethod(section.method),
                inference=cls.to_inference_config(section.inference, global_seed),
            )
            for section in sections
        ]

    @classmethod
    def variant_train_config(cls, config: ExperimentConfig, variant: VariantSection) -> Optional[TrainConfig]:
        """Training settings of a variant: the shared train section with per-method defaults."""
        regimes = {VariantMethod.SCRATCH: TrainRegime.SCRATCH, VariantMethod.FINETUNE: TrainRegime.FINETUNE}
        regime = regimes.get(VariantMethod(variant.method))
        if regime is None:
            return None
        shared = config.train.model_copy(update={"learning_rate": None, "weight_decay": None})
        return cls.to_train_config(
            shared, regime, config.seed, variant.learning_rate, variant.weight_decay
        )

    @classmethod
    def resolved(cls, config: ExperimentConfig, regime: Optional[TrainRegime] = None) -> Dict[str, Any]:
        """
        The config as it was actually run: section seeds filled in and, for a
        training command, the regime's learning rate and weight decay.
        """
        data = config.model_dump(mode="json")
        for section in ("prior", "train", "inference"):
            if data[section].get("seed") is None:
                data[section]["seed"] = config.seed
        if data.get("dataset") and data["dataset"].get("split_seed") is None:
            data["dataset"]["split_seed"] = config.seed
        if regime is not None:
            train = cls.to_train_config(config.train, regime, config.seed)
            data["train"]["learning_rate"] = train.learning_rate
            data["train"]["weight_decay"] = train.weight_decay
        return data

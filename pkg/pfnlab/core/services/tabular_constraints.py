"""
Tabular modelling rules and constants.
Domain-level limits and defaults shared by every layer.
"""


class TabularConstraints:
    """
    Limits inherited from the pretrained model's input format plus the
    hyperparameters of the training regimes.
    """

    # Model input format
    MAX_FEATURES = 100
    MAX_CLASSES = 10

    # Prior datasets are smaller than the model's pretraining context
    MAX_PRIOR_ROWS = 1000
    PRIOR_SUPPORT_FRACTION_RANGE = (0.1, 0.9)

    # Ingestion
    MISSING_SENTINELS = ("", "NA")
    MISSING_WRITE_TOKEN = "NA"

    # Quantile transform
    MAX_QUANTILES = 1000
    GAUSSIAN_RANK_CLIP = 1e-6
    CONSTANT_COLUMN_RANK = 0.5

    # Splits
    DEFAULT_TRAIN_FRACTION = 0.8
    DEFAULT_SUPPORT_FRACTION = 0.8
    DEFAULT_VALIDATION_FRACTION = 0.1

    # Regime hyperparameters (learning rate, weight decay)
    FINETUNE_LEARNING_RATE = 1.0e-5
    FINETUNE_WEIGHT_DECAY = 0.0
    SCRATCH_LEARNING_RATE = 1.0e-4
    SCRATCH_WEIGHT_DECAY = 1.0e-5
    PRETRAIN_LEARNING_RATE = 3.0e-4
    PRETRAIN_WEIGHT_DECAY = 0.0

    # Optimizer
    ADAM_BETAS = (0.9, 0.999)
    ADAM_EPS = 1e-8
    GRAD_CLIP_NORM = 1.0

    # Early stopping
    DEFAULT_EVAL_EVERY = 50
    DEFAULT_PATIENCE = 16

    # Inference
    SUPPORT_BUDGET = 10_000
    ENSEMBLE_SUBSET_SIZE = 1000
    ENSEMBLE_MEMBERS = 10

    @classmethod
    def regime_defaults(cls, regime: str) -> tuple:
        """(learning_rate, weight_decay) for a training regime."""
        defaults = {
            "pretrain": (cls.PRETRAIN_LEARNING_RATE, cls.PRETRAIN_WEIGHT_DECAY),
            "finetune": (cls.FINETUNE_LEARNING_RATE, cls.FINETUNE_WEIGHT_DECAY),
            "scratch": (cls.SCRATCH_LEARNING_RATE, cls.SCRATCH_WEIGHT_DECAY),
        }
        return defaults[regime]

    @classmethod
    def is_missing_token(cls, value: str) -> bool:
        return value in cls.MISSING_SENTINELS

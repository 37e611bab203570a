"""
Optimizer state and the parameter update.
"""
import json
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import torch
from torch import nn
from torch.optim import AdamW
from torch.optim.lr_scheduler import LambdaLR

from pfnlab.core.models.errors import DimensionMismatchError, NonFiniteUpdateError
from pfnlab.core.models.training import LRSchedule, TrainConfig
from pfnlab.core.services.tabular_constraints import TabularConstraints


def schedule_factor(schedule: LRSchedule, max_steps: int):
    """Multiplier of the base learning rate as a function of the step."""
    if LRSchedule(schedule) == LRSchedule.CONSTANT or max_steps < 1:
        return lambda step: 1.0
    return lambda step: 0.5 * (1.0 + math.cos(math.pi * min(step, max_steps) / max_steps))


def first_non_finite_parameter(model: nn.Module) -> Optional[str]:
    for name, parameter in model.named_parameters():
        if not torch.isfinite(parameter).all():
            return name
    return None


def snapshot_parameters(model: nn.Module) -> Dict[str, torch.Tensor]:
    return {name: tensor.detach().clone() for name, tensor in model.state_dict().items()}


@dataclass
class TrainState:
    """
    Everything needed to continue a run: parameters, optimizer moments,
    schedule position, episode rng, early-stop counters and best parameters.
    """
    model: nn.Module
    optimizer: AdamW
    scheduler: LambdaLR
    rng: np.random.Generator
    step: int = 0
    best_validation_metric: float = -math.inf
    steps_since_best: int = 0
    best_params: Optional[Dict[str, torch.Tensor]] = None
    best_step: int = 0
    smoothed_loss: Optional[float] = None

    def state_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model.state_dict(),
            "optimizer": self.optimizer.state_dict(),
            "scheduler": self.scheduler.state_dict(),
            "rng": json.dumps(self.rng.bit_generator.state),
            "step": self.step,
            "best_validation_metric": self.best_validation_metric,
            "steps_since_best": self.steps_since_best,
            "best_params": self.best_params,
            "best_step": self.best_step,
            "smoothed_loss": self.smoothed_loss,
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.model.load_state_dict(state["model"])
        self.optimizer.load_state_dict(state["optimizer"])
        self.scheduler.load_state_dict(state["scheduler"])
        self.rng.bit_generator.state = json.loads(state["rng"])
        self.step = int(state["step"])
        self.best_validation_metric = float(state["best_validation_metric"])
        self.steps_since_best = int(state["steps_since_best"])
        self.best_params = state["best_params"]
        self.best_step = int(state["best_step"])
        self.smoothed_loss = state["smoothed_loss"]


def create_train_state(model: nn.Module, config: TrainConfig) -> TrainState:
    """Fresh optimizer, schedule and episode rng for `model`."""
    optimizer = AdamW(
        model.parameters(),
        lr=config.learning_rate,
        betas=TabularConstraints.ADAM_BETAS,
        eps=TabularConstraints.ADAM_EPS,
        weight_decay=config.weight_decay,
        foreach=False,
    )
    scheduler = LambdaLR(optimizer, schedule_factor(config.schedule, config.max_steps))
    return TrainState(
        model=model,
        optimizer=optimizer,
        scheduler=scheduler,
        rng=np.random.default_rng(config.seed),
        best_params=snapshot_parameters(model),
    )


def optimizer_step(
    state: TrainState,
    grads: Dict[str, torch.Tensor],
    config: TrainConfig,
) -> TrainState:
    """
    One AdamW update: parameters decay by (1 - lr * weight_decay), then take
    the bias-corrected adaptive step. Gradients are clipped to the configured
    global norm first.

    Raises:
        DimensionMismatchError: If a gradient is missing or mis-shaped
        NonFiniteUpdateError: If any parameter is non-finite after the update
    """
    parameters = dict(state.model.named_parameters())
    for name, parameter in parameters.items():
        gradient = grads.get(name)
        if gradient is None or gradient.shape != parameter.shape:
            raise DimensionMismatchError(
                f"Gradient for {name} does not match parameter shape {tuple(parameter.shape)}",
                parameter=name,
            )
        parameter.grad = gradient.detach().to(parameter.dtype).clone()

    if config.grad_clip_norm:
        nn.utils.clip_grad_norm_(parameters.values(), config.grad_clip_norm)

    state.optimizer.step()
    state.scheduler.step()
    state.optimizer.zero_grad(set_to_none=True)
    state.step += 1

    bad_parameter = first_non_finite_parameter(state.model)
    if bad_parameter is not None:
        raise NonFiniteUpdateError(state.step, bad_parameter)
    return state

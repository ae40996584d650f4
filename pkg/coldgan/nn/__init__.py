"""Minimal differentiable dense-network engine on numpy."""

from .activations import Activation, relu, sigmoid
from .checkpoint import Checkpoint, read_checkpoint, write_checkpoint
from .gradcheck import grad_check
from .initializers import init_glorot
from .layers import DenseLayer, ForwardCache, Mlp, backward, forward
from .losses import EPSILON, bce, bce_grad
from .optim import AdamState, adam_step

__all__ = [
    "Activation",
    "relu",
    "sigmoid",
    "Checkpoint",
    "read_checkpoint",
    "write_checkpoint",
    "grad_check",
    "init_glorot",
    "DenseLayer",
    "ForwardCache",
    "Mlp",
    "backward",
    "forward",
    "EPSILON",
    "bce",
    "bce_grad",
    "AdamState",
    "adam_step",
]

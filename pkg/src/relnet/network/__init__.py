from relnet.network.model_io import SavedModel, load_model, save_model
from relnet.network.network import (
    ForwardTrace,
    GroundNetwork,
    activation,
    activation_derivative,
    combine,
    forward,
    ground_activation,
    instantiate,
    score,
)
from relnet.network.params import CombinerMode, ModelParams

__all__ = [
    "CombinerMode",
    "ForwardTrace",
    "GroundNetwork",
    "ModelParams",
    "SavedModel",
    "activation",
    "activation_derivative",
    "combine",
    "forward",
    "ground_activation",
    "instantiate",
    "load_model",
    "save_model",
    "score",
]

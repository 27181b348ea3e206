"""
Learning constitutive laws with invariant-coefficient equivariant models
"""

from .constitutive import linear_law, neo_hookean, stress, sample_deformation, sample_dataset
from .features import feature_invariants, coefficient_inputs, equivariant_features, equivariant_combination
from .mlp import MLPParams, init_mlp, mlp_apply, mlp_gradients
from .optim import AdamState, adam_init, adam_step, cosine_lr
from .model import StressModel, init_model, model_forward, loss_and_gradients
from .experiment import TrainConfig, Metrics, train_model, run_experiment, ConstitutiveExperiment

__all__ = [
    'linear_law', 'neo_hookean', 'stress', 'sample_deformation', 'sample_dataset',
    'feature_invariants', 'coefficient_inputs', 'equivariant_features', 'equivariant_combination',
    'MLPParams', 'init_mlp', 'mlp_apply', 'mlp_gradients',
    'AdamState', 'adam_init', 'adam_step', 'cosine_lr',
    'StressModel', 'init_model', 'model_forward', 'loss_and_gradients',
    'TrainConfig', 'Metrics', 'train_model', 'run_experiment', 'ConstitutiveExperiment',
]

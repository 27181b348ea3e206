"""
Settings and configurations for so3tengen
Tensor-network construction of SO(3) invariant and equivariant functions
"""

TNCORE_CONFIG = {
    'json_indent': 2,
    'relative_tol': 1e-12,
}

SO3_CONFIG = {
    # dense (1)^{⊗l} storage grows as 3^l
    'projector_max_l': 8,
    'basis_max_l': 6,
    'cg_probe_rotations': 4,
    'cg_seed': 20240917,
    'null_space_rcond': 1e-9,
    'imag_tol': 1e-10,
    'sign_tol': 1e-8,
    'symmetric_check_rotations': 50,
    'symmetric_check_seed': 7,
}

ENUMERATION_CONFIG = {
    'max_rank': 4,
    'max_type': 4,
    'max_matchings_per_multiset': 250000,
    'max_networks': 100000,
    'canonical_max_permutations': 40320,
    'refinement_rounds': 8,
    'probe_count': 64,
    'probe_seed': 1234,
    'dedup_tol': 1e-8,
}

VERIFY_CONFIG = {
    'rotations': 200,
    'tolerance': 1e-8,
    'seed': 0,
}

EXPERIMENT_CONFIG = {
    'train_sizes': [100, 500, 1000, 2000, 5000, 10000],
    'val_size': 1000,
    'test_size': 1000,
    'runs': 3,
    'seed': 0,
    'mu': 1.0,
    'lam': 1.0,
    'amplitude': 0.3,
    'det_floor': 0.1,
    'law': 'neo_hookean',
    'variant': 'equi7',
    'hidden': [64, 64],
    'activation': 'tanh',
    'lr': 5e-4,
    'weight_decay': 1e-8,
    'betas': (0.9, 0.999),
    'eps': 1e-8,
    'epochs_small': 2000,
    'epochs_large': 500,
    'small_threshold': 1000,
    'batch_size': None,
    'eval_every': 10,
}

PARALLEL_CONFIG = {
    'max_workers': None,
    'sequential_below': 4,
    'worker_cap': 16,
}

EXIT_CODES = {
    'ok': 0,
    'verification_failed': 1,
    'usage': 2,
    'enumeration_overflow': 3,
    'training_diverged': 4,
}

LOGGING_CONFIG = {
    'level': 'INFO',
    'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'file': None,
    'console': True
}

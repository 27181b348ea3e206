"""
Tests for constitutive laws, features, the perceptron, Adam and the experiment grid
"""

import numpy as np
import pandas as pd
import pytest
from equilearn.constitutive import (
    linear_law, load_dataset_jsonl, neo_hookean, sample_dataset, sample_deformation, stress,
)
from equilearn.experiment import (
    AGGREGATE_COLUMNS, RUN_COLUMNS, ConstitutiveExperiment, TrainConfig, run_experiment, train_model,
)
from equilearn.features import (
    EQUI3, EQUI7, coefficient_inputs, equivariant_combination, equivariant_features, feature_invariants,
)
from equilearn.mlp import MLPParams, init_mlp, mlp_apply, mlp_gradients, zeros_like_mlp
from equilearn.model import init_model, loss_and_gradients, model_forward, mse
from equilearn.optim import adam_init, adam_step, cosine_lr
from equivar.basis import equivariant_basis, evaluate_basis_element
from invgen.signature import Slot, parse_signature
from so3rep.rotations import random_rotations
from utils.errors import DimensionMismatch, NonPhysicalDeformation, ShapeMismatch, TrainingDiverged


def conjugate(r, F):
    return r.m @ F @ r.m.T


def small_config(**overrides):
    base = dict(
        train_sizes=[20, 40], val_size=10, test_size=10, runs=1, hidden=[8],
        epochs_small=30, epochs_large=30, eval_every=5, seed=3,
    )
    base.update(overrides)
    return TrainConfig().with_overrides(**base)


class TestLaws:

    def test_linear_reference_configuration(self):
        np.testing.assert_array_equal(linear_law(np.eye(3)), np.zeros((3, 3)))

    def test_linear_doubled_identity(self):
        np.testing.assert_allclose(linear_law(2 * np.eye(3), 1.0, 1.0), 5 * np.eye(3))

    def test_linear_keeps_symmetry(self, rng):
        a = rng.standard_normal((3, 3))
        P = linear_law(np.eye(3) + 0.1 * (a + a.T))
        np.testing.assert_allclose(P, P.T, atol=1e-14)

    def test_neo_hookean_examples(self):
        np.testing.assert_allclose(neo_hookean(np.eye(3)), np.zeros((3, 3)), atol=1e-15)
        c, mu, lam = 1.3, 0.7, 2.0
        expected = (mu * (c ** 2 - 1) + 3 * lam * np.log(c)) * np.eye(3)
        np.testing.assert_allclose(neo_hookean(c * np.eye(3), mu, lam), expected, atol=1e-12)

    def test_neo_hookean_equivariance(self, rng, rotations):
        F = sample_deformation(rng)
        P = neo_hookean(F)
        for r in rotations:
            np.testing.assert_allclose(neo_hookean(conjugate(r, F)), conjugate(r, P), atol=1e-10)

    def test_non_physical_deformation(self):
        with pytest.raises(NonPhysicalDeformation):
            neo_hookean(np.diag([-1.0, 1.0, 1.0]))

    def test_batch_matches_single(self, rng):
        F, P = sample_dataset(rng, 5)
        for f, p in zip(F, P):
            np.testing.assert_array_equal(neo_hookean(f), p)

    def test_unknown_law(self):
        with pytest.raises(ValueError):
            stress(np.eye(3), 'mooney', 1.0, 1.0)


class TestSampling:

    def test_determinant_floor_and_determinism(self):
        a = sample_deformation(np.random.default_rng(8), 0.3)
        b = sample_deformation(np.random.default_rng(8), 0.3)
        np.testing.assert_array_equal(a, b)
        assert np.linalg.det(a) > 0.1

    def test_small_amplitude_is_near_identity(self, rng):
        F = sample_deformation(rng, 1e-9)
        np.testing.assert_allclose(F, np.eye(3), atol=1e-8)
        np.testing.assert_allclose(neo_hookean(F), np.zeros((3, 3)), atol=1e-7)

    def test_acceptance_rate(self):
        rng = np.random.default_rng(0)
        draws = np.eye(3) + 0.3 * rng.uniform(-1, 1, size=(100000, 3, 3))
        assert np.mean(np.linalg.det(draws) > 0.1) > 0.99

    def test_amplitude_range(self, rng):
        with pytest.raises(ValueError):
            sample_deformation(rng, 1.5)

    def test_labels_are_exact(self, rng):
        F, P = sample_dataset(rng, 50)
        np.testing.assert_array_equal(P, neo_hookean(F))
        assert np.all(np.linalg.det(F) > 0.1)


class TestFeatures:

    def test_invariants_examples(self):
        np.testing.assert_allclose(feature_invariants(np.eye(3)), [3, 3, 3, 3, 3])
        np.testing.assert_allclose(feature_invariants(np.diag([1.0, 2.0, 3.0])), [6, 14, 14, 36, 36])

    def test_invariants_under_conjugation(self, rng, rotations):
        F = sample_deformation(rng)
        for r in rotations:
            np.testing.assert_allclose(feature_invariants(conjugate(r, F)), feature_invariants(F), atol=1e-10)

    def test_batch_shape(self, rng):
        F, _ = sample_dataset(rng, 4)
        assert feature_invariants(F).shape == (4, 5)

    def test_coefficient_inputs(self, rng, rotations):
        F, _ = sample_dataset(rng, 4)
        x = coefficient_inputs(F)
        assert x.shape == (4, 6)
        np.testing.assert_allclose(x[:, :5], feature_invariants(F))
        np.testing.assert_allclose(x[:, 5], np.log(np.linalg.det(F)))
        moved = np.stack([conjugate(rotations[0], f) for f in F])
        np.testing.assert_allclose(coefficient_inputs(moved), x, atol=1e-10)

    def test_identity_features(self):
        for e in equivariant_features(np.eye(3)):
            np.testing.assert_array_equal(e, np.eye(3))

    def test_symmetric_collapse(self, rng):
        a = rng.standard_normal((3, 3))
        feats = equivariant_features(a + a.T)
        for k in (4, 5, 6):
            np.testing.assert_allclose(feats[k], feats[3], atol=1e-12)

    def test_features_under_conjugation(self, rng, rotations):
        F = sample_deformation(rng)
        base = equivariant_features(F)
        for r in rotations:
            for e, moved in zip(base, equivariant_features(conjugate(r, F))):
                np.testing.assert_allclose(moved, conjugate(r, e), atol=1e-10)

    def test_features_match_enumerated_basis(self, rng):
        sig = parse_signature("cart:2")
        basis = equivariant_basis(sig, Slot.cart(2), 2)
        samples = [sample_deformation(rng) for _ in range(3)]
        m = np.column_stack([
            np.concatenate([evaluate_basis_element(e, {0: F}).ravel() for F in samples]) for e in basis
        ])
        f = np.column_stack([
            np.concatenate([equivariant_features(F)[k].ravel() for F in samples]) for k in EQUI7
        ])
        coeffs, *_ = np.linalg.lstsq(m, f, rcond=None)
        assert np.linalg.norm(m @ coeffs - f) < 1e-10 * np.linalg.norm(f)
        assert np.linalg.matrix_rank(np.hstack([m, f])) == 7

    def test_analytic_coefficients_reproduce_neo_hookean(self, rng):
        mu, lam = 1.0, 1.0
        for _ in range(5):
            F = sample_deformation(rng)
            coeffs = np.zeros(7)
            coeffs[0] = lam * np.log(np.linalg.det(F)) - mu
            coeffs[4] = mu
            np.testing.assert_allclose(equivariant_combination(F, coeffs), neo_hookean(F, mu, lam), atol=1e-12)


class TestMLP:

    def test_zero_network(self):
        params = zeros_like_mlp([5, 4, 3])
        np.testing.assert_array_equal(mlp_apply(params, np.ones(5)), np.zeros(3))

    def test_single_linear_layer(self, rng):
        w = rng.standard_normal((2, 3))
        b = rng.standard_normal(2)
        x = rng.standard_normal(3)
        params = MLPParams([w], [b], 'identity')
        np.testing.assert_allclose(mlp_apply(params, x), w @ x + b)

    @pytest.mark.parametrize('skip', [False, True])
    def test_gradients_match_finite_differences(self, skip, rng):
        params = init_mlp([3, 5, 2], rng, skip=skip)
        if skip:
            params.skip = rng.standard_normal((2, 3))
        x = rng.standard_normal((4, 3))
        upstream = rng.standard_normal((4, 2))
        grads, input_grad = mlp_gradients(params, x, upstream, need_input_grad=True)
        arrays = params.arrays()
        h = 1e-6
        for k, a in enumerate(arrays):
            fd = np.zeros_like(a)
            for idx in np.ndindex(a.shape):
                plus = [p.copy() for p in arrays]
                minus = [p.copy() for p in arrays]
                plus[k][idx] += h
                minus[k][idx] -= h
                f_plus = np.sum(upstream * mlp_apply(MLPParams.from_arrays(plus, 'tanh'), x))
                f_minus = np.sum(upstream * mlp_apply(MLPParams.from_arrays(minus, 'tanh'), x))
                fd[idx] = (f_plus - f_minus) / (2 * h)
            np.testing.assert_allclose(grads[k], fd, rtol=1e-5, atol=1e-8)
        assert input_grad.shape == x.shape

    def test_dimension_mismatch(self, rng):
        params = init_mlp([3, 4, 2], rng)
        with pytest.raises(DimensionMismatch):
            mlp_apply(params, np.ones(5))
        broken = MLPParams([np.zeros((4, 3)), np.zeros((2, 5))], [np.zeros(4), np.zeros(2)])
        with pytest.raises(DimensionMismatch):
            mlp_apply(broken, np.ones(3))
        params.skip = np.zeros((3, 2))
        with pytest.raises(DimensionMismatch):
            mlp_apply(params, np.ones(3))

    def test_skip_adds_linear_term(self, rng):
        params = zeros_like_mlp([3, 4, 2], skip=True)
        params.skip = rng.standard_normal((2, 3))
        x = rng.standard_normal((5, 3))
        np.testing.assert_allclose(mlp_apply(params, x), x @ params.skip.T)
        restored = MLPParams.from_arrays(params.arrays(), 'tanh')
        assert len(params.arrays()) == 5
        np.testing.assert_array_equal(restored.skip, params.skip)


class TestAdam:

    def test_first_step_hand_case(self):
        state = adam_step(adam_init([np.array([1.0])], lr=5e-4), [np.array([1.0])])
        assert state.params[0][0] == pytest.approx(0.9995, abs=1e-9)
        assert state.step == 1

    def test_zero_gradient_decoupled_shrink(self):
        lr, wd = 5e-4, 1e-8
        state = adam_init([np.array([2.0, -3.0])], lr=lr, weight_decay=wd, decoupled=True)
        after = adam_step(state, [np.zeros(2)])
        change = np.abs(after.params[0] - state.params[0])
        assert np.all(change <= lr * wd * np.abs(state.params[0]) * (1 + 1e-6) + 1e-18)

    def test_two_identical_steps(self):
        lr, g = 1e-3, 0.25
        state = adam_init([np.array([1.0])], lr=lr, weight_decay=0.0)
        for _ in range(2):
            state = adam_step(state, [np.array([g])])
        assert state.m[0][0] == pytest.approx((1 - 0.9 ** 2) * g)
        assert state.v[0][0] == pytest.approx((1 - 0.999 ** 2) * g * g)
        assert state.params[0][0] == pytest.approx(1.0 - 2 * lr * g / (g + 1e-8), abs=1e-12)

    def test_input_state_untouched(self):
        state = adam_init([np.array([1.0])])
        adam_step(state, [np.array([1.0])])
        assert state.params[0][0] == 1.0
        assert state.step == 0

    def test_shape_mismatch(self):
        state = adam_init([np.zeros(3)])
        with pytest.raises(ShapeMismatch):
            adam_step(state, [np.zeros(4)])

    def test_cosine_schedule(self):
        assert cosine_lr(0, 100, 0.1) == pytest.approx(0.1)
        assert cosine_lr(100, 100, 0.1) == pytest.approx(0.0)
        assert cosine_lr(50, 100, 0.1) == pytest.approx(0.05)


class TestModel:

    @pytest.mark.parametrize('variant', ['equi3', 'equi7'])
    def test_zero_network_predicts_zero(self, variant, rng):
        F, P = sample_dataset(rng, 8)
        model = init_model(variant, [6], rng, F, P)
        model.params = zeros_like_mlp(model.params.sizes, skip=True)
        np.testing.assert_array_equal(model_forward(model, F), np.zeros_like(F))

    def test_equi7_starts_at_neo_hookean(self, rng):
        F, P = sample_dataset(rng, 40)
        model = init_model('equi7', [8], rng, F, P)
        np.testing.assert_array_equal(model.params.weights[-1], 0.0)
        F_test, P_test = sample_dataset(rng, 20)
        assert mse(model_forward(model, F_test), P_test) < 1e-16

    def test_equi3_start_is_least_squares(self, rng):
        F, P = sample_dataset(rng, 40)
        model = init_model('equi3', [8], rng, F, P)
        _, grads = loss_and_gradients(model, F, P)
        assert model.params.skip.shape == (len(EQUI3), 6)
        np.testing.assert_allclose(grads[-3], 0.0, atol=1e-12)
        np.testing.assert_allclose(grads[-1], 0.0, atol=1e-12)

    @pytest.mark.parametrize('variant', ['equi3', 'equi7'])
    def test_equivariant_at_random_parameters(self, variant, rng, rotations):
        F, P = sample_dataset(rng, 8)
        model = init_model(variant, [16, 16], rng, F, P)
        pred = model_forward(model, F)
        for r in rotations:
            moved = model_forward(model, np.stack([conjugate(r, f) for f in F]))
            expected = np.stack([conjugate(r, p) for p in pred])
            assert np.max(np.abs(moved - expected)) <= 1e-6 * (1 + np.max(np.abs(pred)))

    def test_mlp_baseline_is_not_equivariant(self, rng, rotations):
        F, P = sample_dataset(rng, 8)
        model = init_model('mlp', [16, 16], rng, F, P)
        f = F[0]
        p = model_forward(model, f)
        violations = [
            np.linalg.norm(model_forward(model, conjugate(r, f)) - conjugate(r, p)) / (1 + np.linalg.norm(p))
            for r in rotations
        ]
        assert np.mean(np.array(violations) > 1e-2) >= 0.9

    @pytest.mark.parametrize('variant', ['mlp', 'equi3', 'equi7'])
    def test_loss_gradients_match_finite_differences(self, variant, rng):
        F, P = sample_dataset(rng, 10)
        model = init_model(variant, [4], rng, F, P)
        loss, grads = loss_and_gradients(model, F, P)
        assert loss == pytest.approx(mse(model_forward(model, F), P))
        arrays = model.params.arrays()
        h = 1e-6
        for k, a in enumerate(arrays):
            fd = np.zeros_like(a)
            for idx in np.ndindex(a.shape):
                shifted = []
                for sign in (1, -1):
                    trial = [p.copy() for p in arrays]
                    trial[k][idx] += sign * h
                    model.params = MLPParams.from_arrays(trial, 'tanh')
                    shifted.append(mse(model_forward(model, F), P))
                fd[idx] = (shifted[0] - shifted[1]) / (2 * h)
            model.params = MLPParams.from_arrays(arrays, 'tanh')
            np.testing.assert_allclose(grads[k], fd, rtol=1e-4, atol=1e-9)

    def test_batch_mismatch(self, rng):
        F, P = sample_dataset(rng, 4)
        model = init_model('equi3', [4], rng, F, P)
        with pytest.raises(ShapeMismatch):
            loss_and_gradients(model, F, P[:3])

    def test_unknown_variant(self, rng):
        F, P = sample_dataset(rng, 4)
        with pytest.raises(ValueError):
            init_model('equi5', [4], rng, F, P)


class TestExperiment:

    def test_steps_and_overrides(self):
        cfg = TrainConfig().with_overrides(runs=None, epochs_small=7)
        assert cfg.runs == 3
        assert cfg.steps_for(1000) == 7
        assert cfg.steps_for(1001) == cfg.epochs_large

    def test_training_is_deterministic(self):
        cfg = small_config(variant='mlp')
        data = sample_dataset(np.random.default_rng(1), 20)
        val = sample_dataset(np.random.default_rng(2), 10)
        _, val_a, losses_a = train_model(cfg, data, val, np.random.default_rng(5))
        _, val_b, losses_b = train_model(cfg, data, val, np.random.default_rng(5))
        assert losses_a == losses_b
        assert val_a == val_b
        assert len(losses_a) == 30
        assert losses_a[-1] < losses_a[0]

    @pytest.mark.parametrize('variant', ['mlp', 'equi3', 'equi7'])
    def test_checkpoint_never_worse_than_start(self, variant):
        cfg = small_config(variant=variant)
        data = sample_dataset(np.random.default_rng(1), 20)
        val = sample_dataset(np.random.default_rng(2), 10)
        start = init_model(variant, cfg.hidden, np.random.default_rng(5), *data, cfg.activation)
        model, best_val, _ = train_model(cfg, data, val, np.random.default_rng(5))
        assert best_val <= mse(model_forward(start, val[0]), val[1])
        assert best_val == mse(model_forward(model, val[0]), val[1])

    def test_grid_tables(self):
        metrics = run_experiment(small_config())
        assert list(metrics.runs.columns) == RUN_COLUMNS
        assert list(metrics.aggregate.columns) == AGGREGATE_COLUMNS
        assert list(metrics.runs['train_size']) == [20, 40]
        assert (metrics.runs['test_mse'] >= 0).all()
        assert (metrics.aggregate['mse_std'] == 0.0).all()

    def test_reruns_are_identical(self):
        a = run_experiment(small_config(runs=2, train_sizes=[20]))
        b = run_experiment(small_config(runs=2, train_sizes=[20]))
        pd.testing.assert_frame_equal(a.runs.drop(columns='wall_seconds'), b.runs.drop(columns='wall_seconds'))
        pd.testing.assert_frame_equal(a.aggregate, b.aggregate)

    def test_threaded_grid_matches_sequential(self):
        cfg = small_config(runs=2, train_sizes=[20, 30])
        threaded = run_experiment(cfg.with_overrides(workers=2))
        sequential = run_experiment(small_config(runs=1, train_sizes=[20]))
        row = threaded.runs[(threaded.runs['train_size'] == 20) & (threaded.runs['seed'] == 3)]
        assert row['test_mse'].iloc[0] == sequential.runs['test_mse'].iloc[0]

    def test_divergence_reports_seed(self, monkeypatch):
        monkeypatch.setattr(
            'equilearn.experiment.loss_and_gradients', lambda model, F, P: (float('nan'), []),
        )
        with pytest.raises(TrainingDiverged) as err:
            run_experiment(small_config(train_sizes=[20], seed=11))
        assert err.value.seed == 11
        assert err.value.step == 0

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            run_experiment(small_config(train_sizes=[0]))

    def test_pipeline_writes_outputs(self, tmp_path):
        metrics = ConstitutiveExperiment(small_config(train_sizes=[20]), tmp_path).run()
        runs = pd.read_csv(tmp_path / 'runs.csv')
        assert list(runs.columns) == RUN_COLUMNS
        assert len(runs) == len(metrics.runs) == 1
        assert (tmp_path / 'aggregate.csv').exists()
        F, P = load_dataset_jsonl(tmp_path / 'sample.jsonl')
        assert F.shape == (100, 3, 3)
        np.testing.assert_allclose(P, neo_hookean(F), atol=1e-10)


@pytest.mark.slow
def test_trained_baseline_breaks_equivariance():
    """Negative control on trained checkpoints: the MLP violates conjugation, equi7 does not"""
    cfg = TrainConfig().with_overrides(train_sizes=[200], epochs_small=300, hidden=[32, 32])
    rotations = random_rotations(20, 77)
    for variant, broken in (('mlp', True), ('equi7', False)):
        rng = np.random.default_rng(13)
        train = sample_dataset(rng, 200)
        val = sample_dataset(rng, 50)
        model, _, _ = train_model(cfg.with_overrides(variant=variant), train, val, rng)
        f = sample_deformation(rng)
        p = model_forward(model, f)
        violations = np.array([
            np.linalg.norm(model_forward(model, conjugate(r, f)) - conjugate(r, p)) / (1 + np.linalg.norm(p))
            for r in rotations
        ])
        if broken:
            assert np.mean(violations > 1e-2) >= 0.9
        else:
            assert np.max(violations) <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize('train_size', [1000, 5000])
def test_variant_ordering(train_size):
    """equi7 is at or below equi3 and two orders of magnitude below the plain MLP"""
    results = {}
    for variant in ('equi7', 'equi3', 'mlp'):
        cfg = TrainConfig().with_overrides(variant=variant, train_sizes=[train_size], runs=1, seed=0)
        results[variant] = run_experiment(cfg).aggregate['mse_mean'].iloc[0]
    assert results['equi7'] <= results['equi3']
    assert results['equi7'] <= 1e-2 * results['mlp']


@pytest.mark.slow
def test_baseline_improves_with_data():
    cfg = TrainConfig().with_overrides(variant='mlp', train_sizes=[100, 1000], runs=1, seed=0)
    agg = run_experiment(cfg).aggregate.set_index('train_size')['mse_mean']
    assert agg[1000] < agg[100]

"""
Pel-recursive driver: per-pixel recursion, frame pairs and sequences.
"""
import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from pelflow.core.errors import ConfigError, DimensionMismatchError
from pelflow.models.estimation import Algorithm, EstimatorConfig, InitMode, PixelResult, PixelStatus
from pelflow.models.frame import FlowField, Frame, Sequence
from pelflow.models.scene import RectSceneParams
from pelflow.services import estimator as estimator_module
from pelflow.services.estimator import PairContext, PelRecursiveEstimator
from pelflow.services.interp import dfd, gradient_field
from pelflow.services.metrics import dfd_energy, evaluate, fd_energy
from pelflow.services.synth import gen_rect_sequence
from tests.helpers import background_accuracy, smooth_pattern


def run(prev, cur, **overrides):
    return PelRecursiveEstimator(EstimatorConfig(**overrides)).estimate_frame_pair(cur, prev)


class TestConfig:
    def test_mask_lists(self):
        assert EstimatorConfig(algorithm="lscrv").resolved_mask_ids() == [0]
        assert EstimatorConfig(algorithm="lscrv1").resolved_mask_ids() == [0]
        assert EstimatorConfig(algorithm="wiener").resolved_mask_ids() == [0]
        assert EstimatorConfig(algorithm="lscrvb").resolved_mask_ids() == list(range(9))
        assert EstimatorConfig(algorithm="lscrv2", mask_ids=[3, 0]).resolved_mask_ids() == [3, 0]

    @pytest.mark.parametrize("overrides", [
        {"mask_ids": [9]},
        {"mask_ids": [1, 1]},
        {"mask_ids": []},
        {"dfd_threshold": 0},
        {"epsilon": -1},
        {"max_iterations": 0},
        {"algorithm": "lscrv3"},
    ])
    def test_rejects(self, overrides):
        with pytest.raises(ValidationError):
            EstimatorConfig(**overrides)


class TestEstimatePixel:
    def test_registered_pixel_converges_immediately(self, shifted_pair):
        prev, _ = shifted_pair
        result = estimator_module.estimate_pixel(prev, prev, None, (5, 5), (0.0, 0.0), EstimatorConfig())
        assert result.status is PixelStatus.CONVERGED
        assert (result.dx, result.dy) == (0.0, 0.0)
        assert result.iterations == 0

    def test_flat_region_falls_back_to_zero(self):
        prev = Frame(samples=np.full((7, 7), 50))
        cur = Frame(samples=np.full((7, 7), 60))
        for algorithm in Algorithm:
            result = estimator_module.estimate_pixel(
                cur, prev, gradient_field(prev), (3, 3), (0.0, 0.0), EstimatorConfig(algorithm=algorithm)
            )
            assert result.status is PixelStatus.FALLBACK_ZERO
            assert (result.dx, result.dy) == (0.0, 0.0)

    def test_recovers_shift(self, shifted_pair):
        prev, cur = shifted_pair
        result = PelRecursiveEstimator(EstimatorConfig(algorithm="lscrv")).estimate_pixel(cur, prev, None, (12, 10))
        assert result.status is PixelStatus.CONVERGED
        assert abs(dfd(cur, prev, (12, 10), (result.dx, result.dy))) < 3.0

    def test_outside_frame(self, shifted_pair):
        prev, cur = shifted_pair
        with pytest.raises(ConfigError):
            PelRecursiveEstimator().estimate_pixel(cur, prev, None, (24, 0))


class TestFramePair:
    def test_identical_frames_are_static(self, shifted_pair):
        prev, _ = shifted_pair
        for mode in ("causal", "zero"):
            estimate = run(prev, prev, init_mode=mode)
            assert estimate.flow == FlowField.zeros(20, 24)
            assert np.all(estimate.status == PixelStatus.STATIC)

    @pytest.mark.parametrize("algorithm", ["wiener", "lscrv"])
    def test_recovers_uniform_shift(self, shifted_pair, algorithm):
        prev, cur = shifted_pair
        estimate = run(prev, cur, algorithm=algorithm)
        inner = (slice(2, -2), slice(2, -2))
        moving = estimate.status[inner] != PixelStatus.STATIC
        assert moving.mean() > 0.5
        assert np.median(np.abs(estimate.flow.dx[inner][moving] - 1.0)) < 0.3
        assert np.median(np.abs(estimate.flow.dy[inner][moving])) < 0.3

    def test_every_pixel_has_a_status(self, tiny_scene):
        seq, _ = gen_rect_sequence(tiny_scene)
        estimate = run(seq.frames[0], seq.frames[1], algorithm="lscrvb")
        assert set(np.unique(estimate.status)) <= {int(s) for s in PixelStatus}
        assert sum(estimate.status_counts().values()) == 24 * 20

    def test_fallback_never_worse_than_zero(self, tiny_scene):
        seq, _ = gen_rect_sequence(tiny_scene)
        prev, cur = seq.frames
        estimate = run(prev, cur, algorithm="lscrv2")
        for y, x in zip(*np.nonzero(estimate.status == PixelStatus.FALLBACK_ZERO)):
            d = estimate.flow.vector_at(x, y)
            assert abs(dfd(cur, prev, (x, y), d)) <= abs(dfd(cur, prev, (x, y), (0.0, 0.0))) + 1e-9

    @pytest.mark.parametrize("algorithm", [a.value for a in Algorithm])
    def test_compensation_never_worse_than_frame_difference(self, tiny_scene, algorithm):
        seq, _ = gen_rect_sequence(tiny_scene)
        prev, cur = seq.frames
        flow = run(prev, cur, algorithm=algorithm).flow
        assert dfd_energy(cur, prev, flow) <= fd_energy(cur, prev) * (1 + 1e-9)

    def test_displacement_clamp(self, shifted_pair):
        prev, cur = shifted_pair
        flow = run(prev, cur, algorithm="lscrv", init_mode="zero", max_displacement=0.1).flow
        assert np.abs(flow.dx).max() <= 0.1
        assert np.abs(flow.dy).max() <= 0.1

    def test_size_mismatch(self, shifted_pair):
        prev, _ = shifted_pair
        with pytest.raises(DimensionMismatchError):
            run(prev, Frame(samples=np.zeros((5, 5))))


class TestVariantNesting:
    def test_single_mask_multi_variants_reproduce_single_mask_ones(self, tiny_scene):
        seq, _ = gen_rect_sequence(tiny_scene)
        prev, cur = seq.frames
        for multi, single in ((Algorithm.LSCRVB, Algorithm.LSCRV), (Algorithm.LSCRV2, Algorithm.LSCRV1)):
            restricted = run(prev, cur, algorithm=multi, mask_ids=[0])
            reference = run(prev, cur, algorithm=single)
            assert restricted.flow == reference.flow
            np.testing.assert_array_equal(restricted.status, reference.status)


class TestDeterminism:
    def test_repeatable(self, tiny_scene):
        seq, _ = gen_rect_sequence(tiny_scene)
        first = run(*seq.frames, algorithm="lscrv2")
        second = run(*seq.frames, algorithm="lscrv2")
        assert first.flow == second.flow

    def test_parallel_matches_sequential(self, tiny_scene):
        seq, _ = gen_rect_sequence(tiny_scene)
        sequential = run(*seq.frames, algorithm="lscrv", init_mode="zero", workers=1)
        parallel = run(*seq.frames, algorithm="lscrv", init_mode="zero", workers=2)
        assert parallel.flow == sequential.flow
        np.testing.assert_array_equal(parallel.status, sequential.status)

    def test_parallel_replaces_causal_init(self, tiny_scene, caplog):
        seq, _ = gen_rect_sequence(tiny_scene)
        with caplog.at_level(logging.WARNING):
            parallel = run(*seq.frames, algorithm="wiener", init_mode="causal", workers=2)
        assert "causal init replaced by zero init" in caplog.text
        assert parallel.flow == run(*seq.frames, algorithm="wiener", init_mode="zero").flow


class TestInitModes:
    def test_gate_precedes_init(self, shifted_pair):
        prev, _ = shifted_pair
        causal = run(prev, prev, init_mode="causal")
        zero = run(prev, prev, init_mode="zero")
        assert causal.flow == zero.flow

    def test_external_zero_prior_equals_zero_init(self, shifted_pair):
        prev, cur = shifted_pair
        estimator = PelRecursiveEstimator(EstimatorConfig(algorithm="wiener", init_mode=InitMode.EXTERNAL))
        external = estimator.estimate_frame_pair(cur, prev, prior=FlowField.zeros(20, 24))
        assert external.flow == run(prev, cur, algorithm="wiener", init_mode="zero").flow

    def test_external_needs_prior(self, shifted_pair):
        prev, cur = shifted_pair
        with pytest.raises(ConfigError):
            PelRecursiveEstimator(EstimatorConfig(init_mode="external")).estimate_frame_pair(cur, prev)


class TestAcceptance:
    def test_neighborhood_rms(self):
        prev = Frame(samples=np.zeros((5, 5)))
        cur = Frame(samples=np.full((5, 5), 2))
        ctx = PairContext(cur, prev)
        xs, ys = np.meshgrid(np.arange(1, 4), np.arange(1, 4))
        assert ctx.dfd_rms(xs.ravel(), ys.ravel(), 0.0, 0.0) == pytest.approx(math.sqrt(36.0 / 7.0))

    def test_matching_pixel_with_mismatched_neighbors_keeps_iterating(self):
        prev_samples = np.random.default_rng(3).integers(0, 256, size=(11, 11))
        cur_samples = np.roll(prev_samples, 1, axis=1)
        cur_samples[5, 5] = prev_samples[5, 5]
        prev, cur = Frame(samples=prev_samples), Frame(samples=cur_samples)
        result = PelRecursiveEstimator(EstimatorConfig(algorithm="wiener")).estimate_pixel(cur, prev, None, (5, 5))
        assert result.iterations > 0


class TestCausalInit:
    @staticmethod
    def _scripted(monkeypatch, outcomes):
        seen = []

        def fake(self, ctx, x, y, d0):
            seen.append((x, y, tuple(float(v) for v in d0)))
            dx, dy, status = outcomes[(x, y)]
            return PixelResult(dx, dy, status, 0, 1, 0.0, "wiener")

        monkeypatch.setattr(PelRecursiveEstimator, "estimate_pixel_in", fake)
        return seen

    def test_inherits_only_converged_vectors(self, monkeypatch):
        outcomes = {
            (0, 0): (5.0, 5.0, PixelStatus.FALLBACK_ZERO),
            (1, 0): (1.0, 0.0, PixelStatus.CONVERGED),
            (2, 0): (0.0, 0.0, PixelStatus.FALLBACK_ZERO),
            (0, 1): (0.0, 0.0, PixelStatus.FALLBACK_ZERO),
            (1, 1): (2.0, 1.0, PixelStatus.CONVERGED),
            (2, 1): (0.0, 0.0, PixelStatus.FALLBACK_ZERO),
        }
        seen = self._scripted(monkeypatch, outcomes)
        prev = Frame(samples=np.zeros((2, 3)))
        cur = Frame(samples=np.full((2, 3), 9))
        run(prev, cur, init_mode="causal")
        assert seen == [
            (0, 0, (0.0, 0.0)),
            (1, 0, (0.0, 0.0)),
            (2, 0, (1.0, 0.0)),
            (0, 1, (0.0, 0.0)),
            (1, 1, (1.0, 0.0)),
            (2, 1, (2.0, 1.0)),
        ]


class TestReducedScene:
    PARAMS = RectSceneParams(width=64, height=48, rect_x=24, rect_y=16, rect_width=16, rect_height=16)

    def test_background_pixels_lock_on(self):
        seq, _ = gen_rect_sequence(self.PARAMS)
        flow = run(*seq.frames, algorithm="lscrv2").flow
        assert background_accuracy(flow, self.PARAMS, 1) >= 0.9

    def test_sequence_is_stationary(self):
        params = self.PARAMS.model_copy(update={"frames": 4})
        seq, truths = gen_rect_sequence(params)
        flows = estimator_module.estimate_sequence(seq, EstimatorConfig(algorithm="wiener"))
        per_pair = [f.imc_db for f in evaluate(seq, flows, truths).per_frame]
        assert len(per_pair) == 3
        assert max(per_pair) - min(per_pair) <= 2.5
        accuracy = [background_accuracy(flow, params, k) for k, flow in enumerate(flows, start=1)]
        assert min(accuracy) >= 0.9
        assert max(accuracy) - min(accuracy) <= 0.03


class TestSequence:
    def test_one_field_per_pair(self):
        frames = [Frame(samples=smooth_pattern(16, 12, shift_x=k)) for k in range(3)]
        config = EstimatorConfig(algorithm="wiener")
        flows = estimator_module.estimate_sequence(Sequence(frames=frames), config)
        assert len(flows) == 2
        first, _ = estimator_module.estimate_frame_pair(frames[1], frames[0], config)
        assert flows[0] == first

    def test_prior_count_checked(self):
        frames = [Frame(samples=smooth_pattern(8, 8)) for _ in range(3)]
        with pytest.raises(ConfigError):
            PelRecursiveEstimator().estimate_sequence(Sequence(frames=frames), priors=[FlowField.zeros(8, 8)])

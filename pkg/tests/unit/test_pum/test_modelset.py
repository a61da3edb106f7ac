"""
Unit tests for ModelSet construction and on-the-fly updates.
"""

import threading

import numpy as np
import pytest

from hellogram.core.errors import EmptyCorpus
from hellogram.features import ByteMode
from hellogram.ja3.fingerprint import ja3_hash, ja3_string
from hellogram.ja3.repository import LabelRepository
from hellogram.pum.modelset import ModelSet, UpdateStatus, build_models, update, update_with_status
from hellogram.testing import TOOL_CIPHERS, feature, make_raw
from hellogram.wire.clienthello import parse_client_hello
from hellogram.wire.scrub import scrub


class TestBuildModels:
    """Test build_models()."""

    def test_one_model_per_label(self):
        """Test partitioning by label."""
        corpus = [feature(b"\x01\x02", "A"), feature(b"\x03", "B"), feature(b"\x01\x04", "A")]

        models = build_models(corpus, delta=1e-8)

        assert models.labels() == ["A", "B"]
        assert models["A"].counts.n_sequences == 2
        assert models["A"].model.m == 2
        assert models["B"].model.m == 1

    def test_duplicates_counted_once(self):
        """Test per-label deduplication."""
        corpus = [feature(b"\x01\x02", "A"), feature(b"\x01\x02", "A")]

        models = build_models(corpus)

        assert models["A"].counts.n_sequences == 1
        assert models["A"].counts.increments.sum() == 2

    def test_order_independent(self):
        """Test that shuffling the corpus gives the same models."""
        corpus = [feature(bytes([i, i + 1]), "A" if i % 2 else "B") for i in range(10)]

        forward = build_models(corpus)
        backward = build_models(list(reversed(corpus)))

        for name in forward:
            assert np.array_equal(forward[name].model.probs, backward[name].model.probs)

    def test_empty_corpus(self):
        """Test EmptyCorpus."""
        with pytest.raises(EmptyCorpus):
            build_models([])

    @pytest.mark.parametrize("bad_label", [None, "Unknown"])
    def test_rejects_unlabeled(self, bad_label):
        """Test that training data needs a real label."""
        with pytest.raises(ValueError):
            build_models([feature(b"\x01", bad_label)])

    def test_byte_mode_recorded(self):
        """Test that the set remembers its feature mode."""
        models = build_models([feature(b"\x01", "A")], byte_mode=ByteMode.JA3)

        assert models.byte_mode == ByteMode.JA3


class TestModelSetAccess:
    """Test the mapping-like surface."""

    def test_iteration_and_membership(self):
        """Test sorted iteration, __contains__ and get()."""
        models = build_models([feature(b"\x01", "b"), feature(b"\x02", "a")])

        assert list(models) == ["a", "b"]
        assert "a" in models
        assert models.get("missing") is None
        assert len(models.models()) == 2

    def test_rejects_bad_delta(self):
        """Test delta validation."""
        with pytest.raises(ValueError):
            ModelSet(delta=1.0)


class TestUpdate:
    """Test update() and update_with_status()."""

    @pytest.fixture
    def tool_hello(self):
        """A raw hello and a repository labeling it."""
        raw = make_raw(TOOL_CIPHERS, host="t.example.org")
        parsed = parse_client_hello(raw)
        repo = LabelRepository([(ja3_hash(ja3_string(parsed)), "tool")])
        return raw, repo

    def test_creates_model_for_new_label(self, tool_hello):
        """Test that an unseen label gets a model."""
        raw, repo = tool_hello
        models = ModelSet()

        status = update_with_status(models, raw, repo)

        assert status == UpdateStatus.CREATED
        assert "tool" in models
        assert models["tool"].counts.n_sequences == 1

    def test_duplicate_is_skipped(self, tool_hello):
        """Test that the same scrubbed bytes are absorbed once."""
        raw, repo = tool_hello
        models = ModelSet()
        update(models, raw, repo)
        # Different random and SNI, same scrubbed bytes.
        again = make_raw(TOOL_CIPHERS, host="other.example.org", random=b"\x09" * 32)

        status = update_with_status(models, again, repo)

        assert status == UpdateStatus.DUPLICATE
        assert models["tool"].counts.n_sequences == 1

    def test_unknown_hash_skipped(self, tool_hello):
        """Test that Unknown hellos leave the set unchanged."""
        raw, _ = tool_hello
        models = ModelSet()

        status = update_with_status(models, raw, LabelRepository())

        assert status == UpdateStatus.UNKNOWN
        assert len(models) == 0

    def test_update_matches_rebuild(self, tool_hello):
        """Test that incremental updates equal a fresh build over the union."""
        raw, repo = tool_hello
        models = build_models([scrub(parse_client_hello(make_raw(TOOL_CIPHERS[:3])), label="tool")])
        update(models, raw, repo)

        rebuilt = build_models(
            [
                scrub(parse_client_hello(make_raw(TOOL_CIPHERS[:3])), label="tool"),
                scrub(parse_client_hello(raw), label="tool"),
            ]
        )

        assert np.array_equal(models["tool"].counts.increments, rebuilt["tool"].counts.increments)
        assert np.allclose(models["tool"].model.probs, rebuilt["tool"].model.probs)

    def test_only_affected_label_renormalized(self, tool_hello):
        """Test that other labels keep their model objects."""
        raw, repo = tool_hello
        models = build_models([feature(b"\x01\x02", "other")])
        before = models["other"].model

        update(models, raw, repo)

        assert models["other"].model is before

    def test_concurrent_absorbs_lose_nothing(self):
        """Test that parallel writers are serialized."""
        models = ModelSet()
        xs = [feature(bytes([i // 256, i % 256]), "A") for i in range(200)]

        def absorb_all(chunk):
            for x in chunk:
                models.absorb(x)

        threads = [threading.Thread(target=absorb_all, args=(xs[i::4],)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert models["A"].counts.n_sequences == 200

    def test_absorb_order_matches_batch_build(self):
        """Test that 50 sequences absorbed in any order equal build_models cell for cell."""
        rng = np.random.default_rng(41)
        corpus = [
            feature(rng.integers(0, 256, size=int(rng.integers(1, 40)), dtype=np.uint8).tobytes(), f"L{i % 3}")
            for i in range(50)
        ]
        corpus += [corpus[int(i)] for i in rng.choice(50, size=10, replace=False)]
        batch = build_models(corpus, delta=1e-8)

        for _ in range(3):
            online = ModelSet(delta=1e-8)
            for index in rng.permutation(len(corpus)):
                online.absorb(corpus[int(index)])

            assert online.labels() == batch.labels()
            for name in batch:
                assert np.array_equal(online[name].counts.increments, batch[name].counts.increments)
                assert online[name].counts.n_sequences == batch[name].counts.n_sequences
                assert online[name].counts.seen == batch[name].counts.seen

"""
Tests for vector frames: full spark, complement property and sign recovery
"""

import itertools

import numpy as np
import pytest

from schemas import Frame
from services.frames import (classical_sign_recovery, complement_failure_witness,
                             ensure_full_spark, has_complement_property, is_full_spark,
                             is_parseval, recover_signs, stacked_orthobases)
from services.linalg_core import RngState, numeric_rank
from tests.conftest import sign_distance
from utils.exceptions import (AmbiguityError, DomainError, InconsistencyError,
                              ResourceLimitError, WitnessError)

MERCEDES = Frame(vectors=np.sqrt(2 / 3) * np.array([
    [1.0, 0.0],
    [-0.5, np.sqrt(3) / 2],
    [-0.5, -np.sqrt(3) / 2],
]))


def _moduli_mismatch(frame: Frame, a, b) -> float:
    return float(np.max(np.abs(np.abs(frame.vectors @ a) - np.abs(frame.vectors @ b))))


class TestStackedOrthobases:
    """Test stacked orthonormal bases"""

    @pytest.mark.unit
    def test_blocks_are_orthonormal(self, rng):
        """Test that every block is an orthonormal basis"""
        frame = stacked_orthobases(4, 3, rng)

        assert frame.count == 12
        assert frame.blocks == ((0, 4), (4, 8), (8, 12))
        for start, stop in frame.blocks:
            block = frame.vectors[start:stop]
            assert np.allclose(block @ block.T, np.eye(4), atol=1e-10)

    @pytest.mark.unit
    def test_full_spark(self, rng):
        """Test that two stacked bases are full spark"""
        assert is_full_spark(stacked_orthobases(3, 2, rng))

    @pytest.mark.unit
    def test_reproducible(self):
        """Test that the same seed gives the same frame"""
        a = stacked_orthobases(3, 2, RngState(4)).vectors
        b = stacked_orthobases(3, 2, RngState(4)).vectors

        assert np.array_equal(a, b)


class TestFullSpark:
    """Test full spark checks"""

    @pytest.mark.unit
    def test_identity_plus_ones(self):
        """Test a classical full spark frame in R^2"""
        frame = Frame(vectors=[[1, 0], [0, 1], [1, 1]])

        assert is_full_spark(frame)

    @pytest.mark.unit
    def test_repeated_vector(self):
        """Test that a repeated direction breaks full spark"""
        frame = Frame(vectors=[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0]])

        assert not is_full_spark(frame)

    @pytest.mark.unit
    def test_too_few_vectors(self):
        """Test that N < M is a domain error"""
        with pytest.raises(DomainError):
            is_full_spark(Frame(vectors=[[1, 0, 0]]))

    @pytest.mark.unit
    def test_cap_enforced(self, restore_settings):
        """Test that subset enumeration is capped"""
        restore_settings.FULL_SPARK_MAX_SUBSETS = 2
        with pytest.raises(ResourceLimitError):
            is_full_spark(MERCEDES)

    @pytest.mark.unit
    def test_spot_checks_above_cap(self, restore_settings, rng):
        """Test sampled full spark checks when the cap is exceeded"""
        restore_settings.FULL_SPARK_MAX_SUBSETS = 2

        assert ensure_full_spark(MERCEDES, rng)


class TestComplementProperty:
    """Test the exhaustive complement-property oracle"""

    @pytest.mark.unit
    def test_mercedes_frame_holds(self):
        """Test that the Mercedes-Benz frame has the complement property"""
        report = has_complement_property(MERCEDES)

        assert report.holds
        assert report.failing_subset is None
        assert report.margin > 0.1

    @pytest.mark.unit
    def test_orthonormal_basis_fails(self):
        """Test that an orthonormal basis fails with a minimal subset"""
        report = has_complement_property(Frame(vectors=np.eye(2)))

        assert not report.holds
        assert report.failing_subset == (0,)

    @pytest.mark.unit
    def test_cap_enforced(self, rng):
        """Test that frames beyond the vector cap are rejected"""
        with pytest.raises(ResourceLimitError):
            has_complement_property(Frame(vectors=rng.normal((25, 3))))

    @pytest.mark.unit
    def test_full_spark_2m_minus_1_holds(self, rng):
        """Test that 2M-1 full spark vectors have the complement property"""
        frame = Frame(vectors=rng.normal((7, 4)))

        assert is_full_spark(frame)
        assert has_complement_property(frame).holds

    @pytest.mark.unit
    def test_borderline_flag(self):
        """Test that a nearly dependent frame is flagged as borderline"""
        frame = Frame(vectors=[[1.0, 0.0], [0.0, 1.0], [1.0, 5e-9]])
        report = has_complement_property(frame)

        assert report.borderline

    @pytest.mark.integration
    @pytest.mark.slow
    def test_oracle_matches_witness_construction(self):
        """Test that every failing verdict yields an equal-moduli pair and holding frames resist attacks"""
        for trial in range(50):
            rng = RngState(1000 + trial)
            M = 2 + trial % 4
            N = min(14, M + 1 + trial % (M + 2))
            vectors = rng.normal((N, M))
            if trial % 3 == 0:
                vectors[0] = vectors[1]
            frame = Frame(vectors=vectors)
            report = has_complement_property(frame)

            if not report.holds:
                a, b = complement_failure_witness(frame, report.failing_subset)
                assert _moduli_mismatch(frame, a, b) <= 1e-10
                assert sign_distance(a, b) > 1e-6
            else:
                for _ in range(200):
                    a, b = rng.normal(M), rng.normal(M)
                    if _moduli_mismatch(frame, a, b) <= 1e-10:
                        assert sign_distance(a, b) <= 1e-6


class TestComplementFailureWitness:
    """Test explicit failure witnesses"""

    @pytest.mark.unit
    def test_orthonormal_basis_witness(self):
        """Test witness for the standard basis in R^2"""
        frame = Frame(vectors=np.eye(2))
        a, b = complement_failure_witness(frame, [0])

        assert _moduli_mismatch(frame, a, b) <= 1e-12
        assert sign_distance(a, b) > 0.5

    @pytest.mark.unit
    def test_non_failing_subset(self):
        """Test that a subset where one side spans is rejected"""
        with pytest.raises(WitnessError):
            complement_failure_witness(MERCEDES, [0])

    @pytest.mark.unit
    def test_every_failing_subset_of_a_bad_frame(self, rng):
        """Test witnesses for all failing subsets of a repeated-vector frame"""
        v = rng.normal(3)
        frame = Frame(vectors=np.vstack([v, v, rng.normal((2, 3))]))
        for size in range(frame.count + 1):
            for subset in itertools.combinations(range(frame.count), size):
                inside = frame.vectors[list(subset)]
                outside = frame.vectors[[n for n in range(frame.count) if n not in subset]]
                if numeric_rank(inside) < 3 and numeric_rank(outside) < 3:
                    a, b = complement_failure_witness(frame, subset)
                    assert _moduli_mismatch(frame, a, b) <= 1e-10


class TestParseval:
    """Test Parseval checks"""

    @pytest.mark.unit
    def test_mercedes_is_parseval(self):
        """Test that the scaled Mercedes-Benz frame is Parseval"""
        assert is_parseval(MERCEDES, 1e-12)

    @pytest.mark.unit
    def test_two_bases_are_not(self, rng):
        """Test that two stacked bases give frame operator 2I"""
        assert not is_parseval(stacked_orthobases(3, 2, rng))


class TestSignRecovery:
    """Test classical sign recovery"""

    @pytest.mark.unit
    def test_standard_example(self):
        """Test recovery of (1, -1) from the frame (1,0), (0,1), (1,1)"""
        frame = Frame(vectors=[[1, 0], [0, 1], [1, 1]])
        x = classical_sign_recovery(frame, [1.0, 1.0, 0.0])

        assert sign_distance(x, [1.0, -1.0]) <= 1e-12

    @pytest.mark.unit
    def test_inconsistent_moduli(self):
        """Test that impossible moduli raise InconsistencyError"""
        frame = Frame(vectors=[[1, 0], [0, 1], [1, 1]])
        with pytest.raises(InconsistencyError):
            classical_sign_recovery(frame, [1.0, 1.0, 3.0])

    @pytest.mark.unit
    def test_ambiguous_moduli(self):
        """Test that a frame without the complement property is ambiguous"""
        frame = Frame(vectors=np.eye(2))
        with pytest.raises(AmbiguityError):
            classical_sign_recovery(frame, [1.0, 1.0])

    @pytest.mark.unit
    def test_zero_moduli(self):
        """Test that zero moduli give the zero vector"""
        x, residual = recover_signs(MERCEDES, np.zeros(3))

        assert np.array_equal(x, np.zeros(2))
        assert residual == 0.0

    @pytest.mark.unit
    def test_negative_moduli(self):
        """Test that negative moduli are a domain error"""
        with pytest.raises(DomainError):
            recover_signs(MERCEDES, [1.0, -1.0, 0.5])

    @pytest.mark.unit
    def test_round_trip_with_zero_coordinates(self, rng):
        """Test recovery of signals with zero coordinates on stacked bases"""
        frame = stacked_orthobases(5, 2, rng)
        for trial in range(20):
            x = rng.normal(5)
            x[trial % 5] = 0.0
            recovered, residual = recover_signs(frame, np.abs(frame.vectors @ x))
            assert sign_distance(recovered, x) <= 1e-9
            assert residual <= 1e-9

    @pytest.mark.unit
    def test_dependent_leading_vectors(self):
        """Test that the first M vectors must be linearly independent"""
        frame = Frame(vectors=[[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DomainError):
            recover_signs(frame, [1.0, 2.0, 1.0])

    @pytest.mark.unit
    def test_subframe_keeps_order(self):
        """Test that a subframe keeps the selected vectors in the given order"""
        sub = MERCEDES.subframe([2, 0])

        assert sub.count == 2
        assert np.array_equal(sub.vectors, MERCEDES.vectors[[2, 0]])

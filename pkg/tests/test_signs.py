"""Sign algebra: canonical tables cell-for-cell, lattice laws, soundness."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcnet.signs import (
    CANONICAL,
    DOWN,
    NEG,
    NEG_ZERO,
    POS,
    POS_ZERO,
    QMatrix,
    QSign,
    QVector,
    SIGN_SETS,
    UNKNOWN,
    UP,
    ZERO,
    qadd,
    qmatvec,
    qmul,
    sign_of,
)

sign_sets = st.sampled_from(SIGN_SETS)

# magnitudes kept away from overflow/underflow so float sums and products
# cannot lose their true sign to rounding
_reals = st.floats(
    min_value=-1e75, max_value=1e75, allow_nan=False, allow_infinity=False
).filter(lambda x: x == 0 or abs(x) > 1e-75)


class TestCanonicalTables:
    """The canonical 4x4 addition and multiplication tables."""

    ADD = {
        (POS, POS): POS, (POS, ZERO): POS, (POS, NEG): UNKNOWN, (POS, UNKNOWN): UNKNOWN,
        (ZERO, POS): POS, (ZERO, ZERO): ZERO, (ZERO, NEG): NEG, (ZERO, UNKNOWN): UNKNOWN,
        (NEG, POS): UNKNOWN, (NEG, ZERO): NEG, (NEG, NEG): NEG, (NEG, UNKNOWN): UNKNOWN,
        (UNKNOWN, POS): UNKNOWN, (UNKNOWN, ZERO): UNKNOWN, (UNKNOWN, NEG): UNKNOWN,
        (UNKNOWN, UNKNOWN): UNKNOWN,
    }

    MUL = {
        (POS, POS): POS, (POS, ZERO): ZERO, (POS, NEG): NEG, (POS, UNKNOWN): UNKNOWN,
        (ZERO, POS): ZERO, (ZERO, ZERO): ZERO, (ZERO, NEG): ZERO, (ZERO, UNKNOWN): ZERO,
        (NEG, POS): NEG, (NEG, ZERO): ZERO, (NEG, NEG): POS, (NEG, UNKNOWN): UNKNOWN,
        (UNKNOWN, POS): UNKNOWN, (UNKNOWN, ZERO): ZERO, (UNKNOWN, NEG): UNKNOWN,
        (UNKNOWN, UNKNOWN): UNKNOWN,
    }

    # the extra multiplication columns for the directional markers
    MUL_MARKERS = {
        (POS, UP): POS_ZERO, (ZERO, UP): ZERO, (NEG, UP): ZERO, (UNKNOWN, UP): POS_ZERO,
        (POS, DOWN): ZERO, (ZERO, DOWN): ZERO, (NEG, DOWN): NEG_ZERO, (UNKNOWN, DOWN): NEG_ZERO,
    }

    def test_addition_table(self):
        for (a, b), expected in self.ADD.items():
            assert qadd(a, b) == expected, f"{a} + {b}"

    def test_multiplication_table(self):
        for (a, b), expected in self.MUL.items():
            assert qmul(a, b) == expected, f"{a} * {b}"

    def test_marker_columns(self):
        for (a, b), expected in self.MUL_MARKERS.items():
            assert qmul(a, b) == expected, f"{a} * {b}"

    def test_interval_addition_example(self):
        # enumerating the lifted set {+ + +, 0 + +} gives {+}
        assert qadd(POS_ZERO, POS) == POS


class TestSignOf:
    def test_positive(self):
        assert sign_of(0.4, 0) == POS

    def test_zero(self):
        assert sign_of(0, 0) == ZERO

    def test_within_tolerance(self):
        assert sign_of(-1e-15, 1e-12) == ZERO

    def test_negative(self):
        assert sign_of(-3.5) == NEG

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            sign_of(bad)

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValueError):
            sign_of(1.0, -1e-3)


class TestMarkers:
    def test_markers_rejected_in_addition(self):
        with pytest.raises(ValueError):
            qadd(UP, POS)
        with pytest.raises(ValueError):
            qadd(POS, DOWN)

    def test_marker_rejected_as_change(self):
        with pytest.raises(ValueError):
            qmul(UP, POS)

    def test_marker_never_negated(self):
        with pytest.raises(ValueError):
            UP.negated()

    @given(sign_sets)
    def test_up_never_yields_negative(self, change):
        assert not qmul(change, UP).contains(-1)

    @given(sign_sets)
    def test_down_never_yields_positive(self, change):
        assert not qmul(change, DOWN).contains(1)


class TestAlgebraicLaws:
    @given(sign_sets, sign_sets)
    def test_qadd_commutative(self, a, b):
        assert qadd(a, b) == qadd(b, a)

    @given(sign_sets, sign_sets)
    def test_qmul_commutative(self, a, b):
        assert qmul(a, b) == qmul(b, a)

    @given(sign_sets, sign_sets, sign_sets)
    def test_qadd_associative(self, a, b, c):
        assert qadd(qadd(a, b), c) == qadd(a, qadd(b, c))

    @given(sign_sets)
    def test_zero_is_qadd_identity(self, a):
        assert qadd(a, ZERO) == a

    @given(sign_sets)
    def test_zero_annihilates_qmul(self, a):
        assert qmul(a, ZERO) == ZERO
        assert qmul(ZERO, a) == ZERO

    @given(sign_sets, sign_sets, sign_sets)
    def test_lifting_monotone(self, a, b, c):
        wider = a.union(b)
        assert qadd(a, c).issubset(qadd(wider, c))
        assert qmul(a, c).issubset(qmul(wider, c))

    @given(_reals, _reals)
    def test_qadd_sound_for_reals(self, x, y):
        assert sign_of(x + y).issubset(qadd(sign_of(x), sign_of(y)))

    @given(_reals, _reals)
    def test_qmul_sound_for_reals(self, x, y):
        assert sign_of(x * y).issubset(qmul(sign_of(x), sign_of(y)))


class TestTextRendering:
    CASES = {
        POS: "+", ZERO: "0", NEG: "-", UNKNOWN: "?",
        POS_ZERO: "+0", NEG_ZERO: "-0", UP: "^", DOWN: "v",
    }

    def test_tokens(self):
        for value, token in self.CASES.items():
            assert value.token() == token
            assert str(value) == token

    def test_round_trip(self):
        for value, token in self.CASES.items():
            assert QSign.from_token(token) == value

    def test_unknown_token_rejected(self):
        with pytest.raises(ValueError):
            QSign.from_token("++")

    def test_pos_neg_set_renders(self):
        assert POS.union(NEG).token() == "+-"


class TestVectorsAndMatrices:
    def test_matvec_consistent_rows(self):
        m = QMatrix(((POS, NEG), (NEG, POS)))
        v = QVector((POS, NEG))
        assert qmatvec(m, v) == QVector((POS, NEG))

    def test_zero_vector_annihilates(self):
        m = QMatrix(((POS, NEG), (UNKNOWN, UP)))
        v = QVector((ZERO, ZERO))
        assert qmatvec(m, v) == QVector((ZERO, ZERO))

    def test_conflicting_row_folds_to_unknown(self):
        m = QMatrix(((POS, POS),))
        v = QVector((POS, NEG))
        assert qmatvec(m, v) == QVector((UNKNOWN,))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            qmatvec(QMatrix(((POS, NEG),)), QVector((POS,)))

    def test_vector_rejects_markers(self):
        with pytest.raises(ValueError):
            QVector((UP,))

    def test_ragged_matrix_rejected(self):
        with pytest.raises(ValueError):
            QMatrix(((POS,), (POS, NEG)))

    def test_marker_entries_allowed_in_matrix(self):
        m = QMatrix(((UP, DOWN), (ZERO, POS)))
        out = qmatvec(m, QVector((POS, NEG)))
        assert out == QVector((qadd(POS_ZERO, NEG_ZERO), qadd(ZERO, NEG)))

    def test_empty_fold_yields_zero(self):
        m = QMatrix(((),))
        assert qmatvec(m, QVector(())) == QVector((ZERO,))


class TestConstructionErrors:
    def test_invalid_code_rejected(self):
        with pytest.raises(ValueError):
            QSign(0)
        with pytest.raises(ValueError):
            QSign(24)  # both marker bits

    def test_marker_has_no_sign_members(self):
        with pytest.raises(ValueError):
            UP.signs()

    def test_marker_union_rejected(self):
        with pytest.raises(ValueError):
            UP.union(POS)
        with pytest.raises(ValueError):
            POS.union(DOWN)

    def test_marker_widening_rejected(self):
        with pytest.raises(ValueError):
            DOWN.widened()

    def test_marker_subset_only_of_itself(self):
        assert UP.issubset(UP)
        assert not UP.issubset(DOWN)
        assert not UP.issubset(UNKNOWN)
        assert not UNKNOWN.issubset(UP)


class TestSubsetsAndCanonicals:
    def test_canonical_values(self):
        assert [s.token() for s in CANONICAL] == ["+", "0", "-", "?"]

    @given(sign_sets)
    def test_everything_inside_unknown(self, a):
        assert a.issubset(UNKNOWN)

    @given(sign_sets, sign_sets)
    def test_union_is_least_upper_bound(self, a, b):
        u = a.union(b)
        assert a.issubset(u) and b.issubset(u)

    def test_widening(self):
        assert POS.widened() == POS_ZERO
        assert NEG.widened() == NEG_ZERO
        assert ZERO.widened() == ZERO
        assert UNKNOWN.widened() == UNKNOWN
        assert ZERO.widened(zero_strict=True) == UNKNOWN

    def test_negation(self):
        assert POS.negated() == NEG
        assert POS_ZERO.negated() == NEG_ZERO
        assert ZERO.negated() == ZERO
        assert UNKNOWN.negated() == UNKNOWN

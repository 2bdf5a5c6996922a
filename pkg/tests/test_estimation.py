import pytest

from valirank import TrainingEstimates, ml_estimate, smooth_on_demand
from valirank.errors import DataError
from valirank.model import ContingencyTable


def make_estimates(**counts):
    return TrainingEstimates(
        {cls: ContingencyTable(*cells) for cls, cells in counts.items()},
        train_size=200,
        test_size=100,
    )


class TestTrainingEstimates:
    def test_counts_are_read_only(self):
        est = make_estimates(c1=(4, 2, 6))
        with pytest.raises(TypeError):
            est.counts["c2"] = ContingencyTable(1, 1, 1)

    def test_classes_sorted(self):
        est = make_estimates(z=(1, 1, 1), a=(1, 1, 1))
        assert est.classes == ("a", "z")

    @pytest.mark.parametrize("train,test", [(0, 10), (10, 0), (-1, 5)])
    def test_rejects_non_positive_sizes(self, train, test):
        with pytest.raises(DataError):
            TrainingEstimates({"c": ContingencyTable(1, 1, 1)}, train, test)


class TestMlEstimate:
    def test_scales_by_size_ratio(self):
        est = make_estimates(c1=(4, 2, 6))
        t = ml_estimate(est, "c1")
        assert (t.tp, t.fp, t.fn) == (2.0, 1.0, 3.0)
        assert t.tn is None

    def test_unknown_class(self):
        with pytest.raises(DataError, match="no training estimates"):
            ml_estimate(make_estimates(c1=(1, 1, 1)), "zzz")


class TestSmoothOnDemand:
    def test_compliant_table_untouched(self):
        t = ContingencyTable(1.0, 2.0, 3.0)
        out = smooth_on_demand(t)
        assert out.table is t and out.smoothed is False

    def test_small_cell_triggers_uniform_increment(self):
        out = smooth_on_demand(ContingencyTable(5.0, 0.5, 3.0))
        assert out.smoothed is True
        assert (out.table.tp, out.table.fp, out.table.fn) == (6.0, 1.5, 4.0)

    def test_idempotent(self):
        once = smooth_on_demand(ContingencyTable(0.0, 0.0, 0.0))
        twice = smooth_on_demand(once.table)
        assert twice.table == once.table and twice.smoothed is False

    def test_preserves_tn(self):
        out = smooth_on_demand(ContingencyTable(0, 0, 0, 7.0))
        assert out.table.tn == 7.0

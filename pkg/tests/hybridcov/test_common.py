import pytest

from hybridcov import common
from hybridcov import exceptions


def test_kw_exception():
    e = exceptions.SingularityError(support_size=3, condition=1e13)

    assert e.support_size == 3
    assert e.condition == 1e13
    assert e.missing is None
    assert str(e) == "support_size=3, condition=10000000000000.0"


def test_kw_exception_is_exception():
    with pytest.raises(common.KwException):
        raise exceptions.ConfigurationError(field="M", reason="too large")


@pytest.mark.parametrize(
    "value, mode",
    [
        (1, common.ScheduleMode.AVERAGED),
        (2, common.ScheduleMode.STACKED_COMBINERS),
        (3, common.ScheduleMode.STACKED_PRECODERS),
        (4, common.ScheduleMode.FULLY_VARYING),
    ],
)
def test_schedule_mode(value, mode):
    assert common.ScheduleMode(value) == mode


def test_coherence_kind_values():
    assert common.CoherenceKind("rho_ds") == common.CoherenceKind.DS
    assert {k.value for k in common.CoherenceKind} == {"rho_s_limit", "rho_s", "rho_ds", "rho_dc", "rho_ds_bound"}


def test_tolerances_frozen():
    with pytest.raises(AttributeError):
        common.TOLERANCES.projector = 1.0

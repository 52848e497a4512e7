import logging

import pytest

from ranslice import cli
from ranslice.config import ConfigurationError, sim_config_from_dict
from ranslice.engine import MetricsReport, UndefinedRatioError, compute_ratio
from ranslice.link import ber_from_snr
from ranslice.model import AccountingError, ActiveGrant, ResourcePool
from ranslice.resources import release


def test_unknown_fields_are_listed_together() -> None:
    with pytest.raises(ConfigurationError) as excinfo:
        sim_config_from_dict({"attack": {"rate": 0.5, "bias": 1}})
    assert str(excinfo.value) == "Unknown configuration field(s): attack.bias, attack.rate"


def test_invalid_section_value_names_the_section() -> None:
    with pytest.raises(ConfigurationError) as excinfo:
        sim_config_from_dict({"traffic": {"ue_count": -1}})
    assert str(excinfo.value).startswith("Invalid traffic configuration:")


def test_release_overflow_reports_the_totals() -> None:
    grant = ActiveGrant(1, 3, 0.0, 0.0, start_slot=0, end_slot=1)
    with pytest.raises(AccountingError) as excinfo:
        release(ResourcePool(total_rbs=11, free_rbs=10), [grant])
    assert "13 free RBs exceeds total 11" in str(excinfo.value)


def test_domain_errors_show_the_value() -> None:
    with pytest.raises(ValueError) as excinfo:
        ber_from_snr(-2.0)
    assert "-2.0" in str(excinfo.value)


def test_undefined_ratio_message() -> None:
    with pytest.raises(UndefinedRatioError) as excinfo:
        compute_ratio(MetricsReport(), MetricsReport())
    assert "ratio is undefined" in str(excinfo.value)


def test_cli_logs_failures(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.ERROR, logger="ranslice.cli"):
        with pytest.raises(SystemExit):
            cli.main(["run", "--slots", "5", "--window", "9"])
    assert "Command failed" in caplog.text
    assert "measure_window" in caplog.text

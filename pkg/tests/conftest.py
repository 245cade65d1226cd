import os

import numpy as np
import pytest
from click.testing import CliRunner

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.enums import PayloadKind
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.synthetic.generate import generate_instance
from _capsim_sdk.synthetic.models import SyntheticConfig


def _n_rows(events, rows):
    return np.arange(len(events))[rows].shape[0]


class CoupledRule(AuctionRule):
    """
    Two campaigns: (0.3, 0.2) while campaign 1 is active, (0, 0.4) once it is not. Campaign 2 only spends when
    active.
    """

    def __init__(self):
        super().__init__(2)

    @property
    def max_increment(self):
        return 0.5

    def _spends(self, events, rows, active):
        n = _n_rows(events, rows)
        active = np.broadcast_to(active, (n, 2))
        first = active[:, 0]
        out = np.zeros((n, 2))
        out[:, 0] = np.where(first, 0.3, 0.0)
        out[:, 1] = np.where(first, 0.2, 0.4) * active[:, 1]
        return out


class ConstantRule(AuctionRule):
    """Every active campaign spends `rates[c]` on every event, independently of the others."""

    def __init__(self, rates):
        self.rates = np.asarray(rates, dtype=np.float64)
        super().__init__(self.rates.shape[0])

    @property
    def max_increment(self):
        return float(np.nextafter(self.rates.max(), np.inf))

    def _spends(self, events, rows, active):
        n = _n_rows(events, rows)
        return np.broadcast_to(active, (n, self.n_campaigns)) * self.rates


class ZeroRule(AuctionRule):
    @property
    def max_increment(self):
        return 1.0

    def _spends(self, events, rows, active):
        return np.zeros((_n_rows(events, rows), self.n_campaigns))


class NegativeRule(ZeroRule):
    def _spends(self, events, rows, active):
        return -np.ones((_n_rows(events, rows), self.n_campaigns))


def plain_events(n, dim=1):
    return EventStream(kind=PayloadKind.EMBEDDING, payloads=np.zeros((n, dim)))


@pytest.fixture(autouse=True)
def clean_environment(mocker):
    mocker.patch.dict(os.environ, clear=True)


@pytest.fixture(scope="session")
def runner():
    cli_runner = CliRunner()
    # prevent local .env files from interfering with tests
    with cli_runner.isolated_filesystem():
        yield cli_runner


@pytest.fixture
def reducer():
    return ChunkReducer(chunk_size=64, workers=1)


@pytest.fixture
def toy_events():
    return plain_events(4)


@pytest.fixture
def toy_campaigns():
    return CampaignSet(budgets=[0.5, 1.0])


@pytest.fixture
def coupled_rule():
    return CoupledRule()


@pytest.fixture(scope="session")
def small_instance():
    """N=2000, K=5 synthetic instance with b_base chosen so that some campaigns cap."""
    return generate_instance(
        SyntheticConfig(n_events=2000, n_campaigns=5, dim=4, b_base=20.0, seed=7)
    )


@pytest.fixture(scope="session")
def instance_file(tmp_path_factory, small_instance):
    path = tmp_path_factory.mktemp("instances") / "small.npz"
    small_instance.save(path)
    return path

import os

import pytest
from hypothesis import HealthCheck, settings

from fairaudit import scorecard, tabular

settings.register_profile(
    "ci", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
GERMAN_PATH = os.path.join(REPO_ROOT, "data", "german.data")


@pytest.fixture(scope="session")
def german_path():
    return GERMAN_PATH


@pytest.fixture(scope="session")
def german_raw():
    return tabular.load_german_credit(GERMAN_PATH)


@pytest.fixture(scope="session")
def german(german_raw):
    return tabular.derive_sensitive_features(german_raw)


@pytest.fixture(scope="session")
def card(german):
    return scorecard.fit_scorecard(german)


@pytest.fixture(scope="session")
def scores(card, german):
    return card.score_dataset(german)

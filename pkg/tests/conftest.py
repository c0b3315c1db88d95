import numpy as np
import pytest

from depcens import CopulaFamily, FitConfig, ModelSpec
from depcens.simulate import Scenario, generate_dataset, scenario_true_model


@pytest.fixture(scope="session")
def s1_model():
    return scenario_true_model(Scenario.S1_H1)


@pytest.fixture(scope="session")
def s1_data(s1_model):
    data, truth = generate_dataset(s1_model, 300, np.random.default_rng(20240317))
    return data, truth


@pytest.fixture(scope="session")
def frank_spec():
    return ModelSpec(CopulaFamily.FRANK)


@pytest.fixture(scope="session")
def s1_fit(s1_data, frank_spec):
    from depcens import fit

    return fit(s1_data[0], frank_spec, FitConfig())

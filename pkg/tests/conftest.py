import numpy as np
import pytest

from triwave.dynamics import unitary_3level
from triwave.open_system import default_model, noiseless
from triwave.pulse_control import OptimizationConfig, grape_optimize, interpolation_target_unitary


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def quiet_model(model):
    return noiseless(model)


@pytest.fixture(scope="session")
def harmonic_model(model):
    """Drift-free in the rotating frame: the zero pulse is the identity gate."""
    from dataclasses import replace

    h0 = model.frame_freq * np.arange(model.levels, dtype=float)
    h0.setflags(write=False)
    return noiseless(replace(model, h0_diag=h0))


@pytest.fixture(scope="session")
def fig1c_gate(model):
    return grape_optimize(model, unitary_3level(0.1, np.pi / 2, 2), OptimizationConfig())


@pytest.fixture(scope="session")
def fig2_gate(model):
    return grape_optimize(model, unitary_3level(0.2, np.pi / 2, 2), OptimizationConfig.for_duration(80.0))


@pytest.fixture(scope="session")
def anchors(model, fig1c_gate):
    cfg = OptimizationConfig()
    inf = grape_optimize(model, interpolation_target_unitary(np.inf), cfg, initial=fig1c_gate.pulse)
    return fig1c_gate, inf

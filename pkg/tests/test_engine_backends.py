"""Compiled vs pure-Python kernel equivalence."""

import subprocess
import sys

import numpy as np
import pytest

from conftest import random_rates, random_state

from epiward import _simcore_py
from epiward import engine

compiled = pytest.importorskip("epiward._simcore", reason="compiled kernel not built")


def test_backends_bit_identical(rng):
    for _ in range(25):
        p_total = float(rng.uniform(1e3, 1e6))
        state0 = random_state(rng, p_total).as_array()
        days = int(rng.integers(1, 400))
        matrix = np.vstack(
            [random_rates(rng, max_outflow=0.8, chain_safe=True).as_array() for _ in range(days)]
        )
        a = compiled.simulate_path(state0, matrix, p_total)
        b = _simcore_py.simulate_path(state0, matrix, p_total)
        assert a.shape == b.shape == (days + 1, 10)
        assert (a == b).all()


def test_default_backend_is_compiled_when_built():
    assert engine.BACKEND == "compiled"


def test_env_var_forces_python_backend():
    code = "import epiward.engine as e; print(e.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "EPIWARD_BACKEND": "python"},
        check=True,
    )
    assert out.stdout.strip() == "python"

import os
import subprocess
import sys

import numpy as np
import pytest

from wignerbell import _kernels
from wignerbell.lorentz import on_shell, random_lorentz
from wignerbell.wigner import wigner_finite

IMPLS = sorted(_kernels.IMPLEMENTATIONS)


def test_backends_listed():
    assert "numpy" in IMPLS
    assert _kernels.BACKEND in IMPLS


@pytest.mark.parametrize("name", IMPLS)
def test_wigner_quats_backends_agree(rng, name):
    L = np.stack([random_lorentz(rng)[0] for _ in range(50)])
    p3 = rng.normal(size=(50, 3)) * 2
    ref = _kernels.IMPLEMENTATIONS["numpy"]["wigner_quats"](L, p3, 1.3)
    got = _kernels.IMPLEMENTATIONS[name]["wigner_quats"](L, p3, 1.3)
    # quaternions are defined up to overall sign
    sign = np.sign(np.sum(ref * got, axis=-1, keepdims=True))
    assert np.abs(got * sign - ref).max() < 1e-12
    assert np.abs(np.linalg.norm(got, axis=-1) - 1).max() < 1e-12
    for k in range(5):
        q = wigner_finite(L[k], on_shell(p3[k], 1.3), 1.3).quat
        assert min(np.abs(got[k] - q).max(), np.abs(got[k] + q).max()) < 1e-10


@pytest.mark.parametrize("name", IMPLS)
@pytest.mark.parametrize("axis", [1, 2, 3])
def test_central_difference_backends(rng, name, axis):
    f = rng.normal(size=(2, 9, 10, 11)) + 1j * rng.normal(size=(2, 9, 10, 11))
    got = _kernels.IMPLEMENTATIONS[name]["central_difference"](f, 0.1, axis)
    ref = np.gradient(f, 0.1, axis=axis)
    inner = [slice(None)] * 4
    inner[axis] = slice(1, -1)
    assert np.abs(got[tuple(inner)] - ref[tuple(inner)]).max() < 1e-12


def test_env_flag_selects_numpy():
    env = dict(os.environ, WIGNERBELL_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from wignerbell import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"

import numpy as np
import pytest

from aledg import euler, flux
from aledg.errors import ConfigError, InvalidStateError

EOS = euler.EosParams(1.4)


def _rand_state(rng, d):
    return euler.cons_arr(rng.uniform(0.1, 3.0), rng.normal(0, 2, d),
                          rng.uniform(0.1, 5.0), 1.4)


def test_flux_spec_validation():
    with pytest.raises(ConfigError):
        flux.FluxSpec("weno")
    with pytest.raises(ConfigError):
        flux.FluxSpec("roe", roe_alpha=-0.1)


def test_ale_flux_zero_mesh_velocity_is_physical():
    u = euler.prim_to_cons(euler.PrimitiveState(1.1, [0.4, -0.2], 0.9), EOS)
    g = flux.ale_flux(u, [0.0, 0.0], [1.0, 0.0], EOS)
    assert np.allclose(g, euler.physical_flux(u, [1.0, 0.0], EOS))


def test_ale_flux_comoving_mass_zero():
    u = euler.prim_to_cons(euler.PrimitiveState(2.0, [0.7], 1.3), EOS)
    g = flux.ale_flux(u, [0.7], [1.0], EOS)
    assert abs(g[0]) < 1e-14


def test_ale_flux_contact_example():
    # (rho=2, v=1, p=1), w=1: mass 0, momentum p=1, energy (E+p)v - E w = 1
    u = euler.prim_to_cons(euler.PrimitiveState(2.0, [1.0], 1.0), EOS)
    assert u.energy == pytest.approx(3.5)
    g = flux.ale_flux(u, [1.0], [1.0], EOS)
    assert np.allclose(g, [0.0, 1.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("kind", flux.FLUX_KINDS)
def test_consistency_randomized(kind):
    rng = np.random.default_rng(11)
    spec = flux.FluxSpec(kind)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 3))
        U = _rand_state(rng, d)
        n = (np.array([rng.choice([-1.0, 1.0])]) if d == 1
             else (lambda a: a / np.linalg.norm(a))(rng.normal(0, 1, 2)))
        wv = rng.normal(0, 1, d)
        wn = np.array([wv @ n])
        H = flux.numerical_flux_arr(U[None], U[None], wn, n[None], 1.4, spec)[0]
        G = flux.ale_flux_arr(U[None], wn, n[None], 1.4)[0]
        worst = max(worst, np.abs(H - G).max())
    assert worst < 1e-13


@pytest.mark.parametrize("kind", flux.FLUX_KINDS)
def test_conservation_antisymmetry(kind):
    rng = np.random.default_rng(5)
    spec = flux.FluxSpec(kind)
    worst = 0.0
    for _ in range(400):
        d = int(rng.integers(1, 3))
        UL, UR = _rand_state(rng, d), _rand_state(rng, d)
        n = (np.array([rng.choice([-1.0, 1.0])]) if d == 1
             else (lambda a: a / np.linalg.norm(a))(rng.normal(0, 1, 2)))
        wv = rng.normal(0, 1, d)
        wn = np.array([wv @ n])
        Ha = flux.numerical_flux_arr(UL[None], UR[None], wn, n[None], 1.4, spec)[0]
        Hb = flux.numerical_flux_arr(UR[None], UL[None], -wn, -n[None], 1.4, spec)[0]
        worst = max(worst, np.abs(Ha + Hb).max())
    assert worst < 1e-13 * 50  # states up to O(10), fluxes O(50)


def _boost(U, V):
    B = np.array([[1, 0, 0], [V, 1, 0], [V * V / 2, V, 1]])
    return U @ B.T, B


def test_rusanov_galilean_covariance():
    rng = np.random.default_rng(9)
    spec = flux.FluxSpec("rusanov")
    for _ in range(200):
        UL, UR = _rand_state(rng, 1), _rand_state(rng, 1)
        w = rng.normal(0, 1, 1)
        V = rng.uniform(-20, 20)
        H = flux.numerical_flux_arr(UL[None], UR[None], np.array([w[0]]),
                                    np.ones((1, 1)), 1.4, spec)[0]
        ULb, B = _boost(UL, V)
        URb, _ = _boost(UR, V)
        Hb = flux.numerical_flux_arr(ULb[None], URb[None], np.array([w[0] + V]),
                                     np.ones((1, 1)), 1.4, spec)[0]
        scale = max(1.0, np.abs(Hb).max())
        assert np.abs(Hb - B @ H).max() < 1e-12 * scale * max(1.0, V * V)


def test_roe_contact_fix_value():
    # |v-w| = 0.01, c = 1, alpha = 0.1: |lam2| -> (delta + |v-w|^2/delta)/2
    out = flux._contact_fix(np.array([0.01]), np.array([0.01]), np.array([1.0]), 0.1)
    assert out[0] == pytest.approx(0.0505, rel=1e-12)


def test_roe_alpha_zero_plain():
    # a stationary contact stays perfectly undissipated only at alpha = 0
    UL = euler.cons_arr(2.0, np.array([1.0]), 1.0, 1.4)
    UR = euler.cons_arr(1.0, np.array([1.0]), 1.0, 1.4)
    wn = np.array([1.0])  # face co-moving with the contact
    n = np.ones((1, 1))
    H0 = flux.numerical_flux_arr(UL[None], UR[None], wn, n, 1.4, flux.FluxSpec("roe", 0.0))[0]
    G = flux.ale_flux_arr(UL[None], wn, n, 1.4)[0]
    assert np.abs(H0 - G).max() < 1e-13
    H1 = flux.numerical_flux_arr(UL[None], UR[None], wn, n, 1.4, flux.FluxSpec("roe", 0.1))[0]
    assert np.abs(H1 - G).max() > 1e-3  # the fix adds dissipation on the jump


def test_invalid_input_state_raises():
    uL = euler.ConservedState(1.0, [0.0], -1.0)
    uR = euler.ConservedState(1.0, [0.0], 2.5)
    with pytest.raises(InvalidStateError):
        flux.numerical_flux(uL, uR, [0.0], [1.0], flux.FluxSpec("rusanov"), EOS)


def test_rusanov_definition():
    UL = euler.cons_arr(1.0, np.array([0.2]), 1.0, 1.4)
    UR = euler.cons_arr(0.5, np.array([-0.1]), 0.6, 1.4)
    wn = np.array([0.05])
    n = np.ones((1, 1))
    H = flux.numerical_flux_arr(UL[None], UR[None], wn, n, 1.4, flux.FluxSpec("rusanov"))[0]
    GL = flux.ale_flux_arr(UL[None], wn, n, 1.4)[0]
    GR = flux.ale_flux_arr(UR[None], wn, n, 1.4)[0]
    s = max(euler.max_signal_arr(UL[None], wn, n, 1.4)[0],
            euler.max_signal_arr(UR[None], wn, n, 1.4)[0])
    assert np.allclose(H, 0.5 * (GL + GR) - 0.5 * s * (UR - UL), rtol=1e-14)

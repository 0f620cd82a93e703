import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aledg import dg_basis, euler, limiter, mesh1d
from aledg.errors import ConfigError, InvalidStateError

vals = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_limiter_config_validation():
    with pytest.raises(ConfigError):
        limiter.LimiterConfig(kind="weno")
    with pytest.raises(ConfigError):
        limiter.LimiterConfig(M=-1.0)
    with pytest.raises(ConfigError):
        limiter.LimiterConfig(nu=0.5)


def test_minmod_tables():
    assert limiter.minmod(1.0, 2.0, 3.0) == 1.0
    assert limiter.minmod(1.0, -2.0, 3.0) == 0.0
    assert limiter.minmod(-1.0, -2.0, -0.5) == -0.5


@settings(max_examples=200, deadline=None)
@given(vals, vals, vals)
def test_minmod_odd(a, b, c):
    assert limiter.minmod(-a, -b, -c) == pytest.approx(-limiter.minmod(a, b, c))


def test_minmod_tvb_threshold():
    # |0.5| <= 100 * 0.1^2 = 1 -> first argument returned untouched
    assert limiter.minmod_tvb(0.5, -3.0, 2.0, M=100.0, dx=0.1) == 0.5
    # below threshold fails -> plain minmod (signs differ -> 0)
    assert limiter.minmod_tvb(0.5, -3.0, 2.0, M=0.0, dx=0.1) == 0.0


def test_minmod_tvb_huge_M_passthrough():
    rng = np.random.default_rng(0)
    a = rng.normal(size=100)
    b = rng.normal(size=100)
    out = limiter.minmod_tvb(a, b, M=1e12, dx=1.0)
    assert np.array_equal(out, a)


def _linear_coeffs(mesh, slope, nvars=1, degree=1):
    basis = dg_basis.basis_for(1, degree)
    phi0 = basis.eval(np.array([[0.0]]))[0, 0]
    phi1r = basis.eval(np.array([[1.0]]))[0, 1]
    n = mesh.n_cells
    C = np.zeros((n, degree + 1, nvars))
    xb = mesh.centers
    C[:, 0, :] = (slope * xb)[:, None] / phi0
    C[:, 1, :] = (slope * mesh.h / 2)[:, None] / phi1r
    return C


def test_tvd_1d_globally_linear_unchanged():
    # interior cells see matching slopes on both sides and stay untouched;
    # the two boundary cells clip against their zero-gradient ghosts
    mesh = mesh1d.Mesh1D(np.linspace(0, 1, 11))
    C = _linear_coeffs(mesh, slope=2.0)
    cfg = limiter.LimiterConfig(kind="tvd_1d", M=0.0, characteristic=False)
    out, n = limiter.tvd_limit_1d(C, mesh, cfg, system="scalar")
    assert n <= 2
    assert np.allclose(out[1:-1], C[1:-1])


def test_tvd_1d_spike_zeroed():
    mesh = mesh1d.Mesh1D(np.linspace(0, 1, 4))
    basis = dg_basis.basis_for(1, 1)
    phi0 = basis.eval(np.array([[0.0]]))[0, 0]
    C = np.zeros((3, 2, 1))
    C[:, 0, 0] = np.array([0.0, 1.0, 0.0]) / phi0
    C[1, 1, 0] = 0.3
    cfg = limiter.LimiterConfig(kind="tvd_1d", M=0.0, characteristic=False)
    out, n = limiter.tvd_limit_1d(C, mesh, cfg, system="scalar")
    assert n >= 1
    assert abs(out[1, 1, 0]) < 1e-14


def test_tvd_1d_constant_identity():
    mesh = mesh1d.Mesh1D(np.linspace(0, 1, 9))
    C = np.zeros((8, 3, 3))
    C[:, 0, :] = [2.0, 0.5, 3.0]
    cfg = limiter.LimiterConfig(kind="tvd_1d", M=0.0)
    out, n = limiter.tvd_limit_1d(C, mesh, cfg, gamma=1.4)
    assert np.allclose(out, C)


def test_tvd_1d_preserves_cell_averages():
    rng = np.random.default_rng(3)
    mesh = mesh1d.Mesh1D(np.sort(np.concatenate([[0, 1], rng.uniform(0.05, 0.95, 14)])))
    C = rng.normal(size=(15, 3, 3))
    C[:, 0, 0] = np.abs(C[:, 0, 0]) + 3.0   # keep states valid
    C[:, 0, 2] = np.abs(C[:, 0, 2]) + 30.0
    cfg = limiter.LimiterConfig(kind="tvd_1d", M=0.0)
    out, _ = limiter.tvd_limit_1d(C, mesh, cfg, gamma=1.4)
    assert np.allclose(out[:, 0, :], C[:, 0, :], rtol=0, atol=0)


def test_psi_basis_reference_cell():
    verts = np.array([[0, 0], [1, 0], [0, 1.0]])
    A = limiter.psi_basis(verts)
    mids = np.array([[0.5, 0.5], [0.0, 0.5], [0.5, 0.0]])
    # cardinal property psi_i(m_j) = delta_ij
    P = np.column_stack([np.ones(3), mids[:, 0], mids[:, 1]])
    assert np.abs(P @ A - np.eye(3)).max() < 1e-12
    # the three coefficient vectors match (1,0,-2), (1,-2,0), (-1,2,2)
    cols = {tuple(np.round(A[:, i], 9)) for i in range(3)}
    assert cols == {(1.0, 0.0, -2.0), (1.0, -2.0, 0.0), (-1.0, 2.0, 2.0)}


def test_psi_partition_of_unity():
    rng = np.random.default_rng(1)
    verts = rng.normal(size=(3, 2))
    if mesh2d_orientation(verts) < 0:
        verts = verts[[0, 2, 1]]
    A = limiter.psi_basis(verts)
    pts = rng.normal(size=(100, 2))
    P = np.column_stack([np.ones(100), pts[:, 0], pts[:, 1]])
    psi = P @ A
    assert np.abs(psi.sum(axis=1) - 1.0).max() < 1e-10


def mesh2d_orientation(v):
    return (v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1]) - (v[1, 1] - v[0, 1]) * (v[2, 0] - v[0, 0])


def test_psi_degenerate_raises():
    with pytest.raises(InvalidStateError):
        limiter.psi_basis(np.array([[0, 0], [1, 1], [2, 2.0]]))


def test_rebalance_example():
    # delta = (2, -1, 0): pos=2, neg=1, theta+=1/2, theta-=1 -> (1, -1, 0)
    out = limiter.rebalance(np.array([2.0, -1.0, 0.0]))
    assert np.allclose(out, [1.0, -1.0, 0.0])
    assert out.sum() == pytest.approx(0.0, abs=1e-15)


def test_rebalance_zero_sum_case1():
    d = np.array([0.5, -0.3, -0.2])
    assert np.allclose(limiter.rebalance(d), d)


def _equilateral_patch():
    # center cell + 3 congruent neighbors mirrored across each face
    verts = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    bc = verts.mean(axis=0)
    mids = np.array([0.5 * (verts[1] + verts[2]), 0.5 * (verts[2] + verts[0]),
                     0.5 * (verts[0] + verts[1])])
    nb = np.array([bc + 2 * (m - bc) for m in mids])
    return verts, bc, mids, nb


def test_tvb_2d_constant_patch_untouched():
    verts, bc, mids, nb = _equilateral_patch()
    cfg = limiter.LimiterConfig(kind="tvb_2d", M=0.0, characteristic=False)
    ubar = np.array([2.5])
    umid = np.full((3, 1), 2.5)
    dhat, engaged = limiter.tvb_limit_2d(verts, ubar, umid, nb, np.full((3, 1), 2.5), cfg)
    assert not engaged
    assert np.abs(dhat).max() < 1e-14


def test_tvb_2d_globally_linear_unchanged():
    rng = np.random.default_rng(5)
    g = rng.normal(size=2)
    verts, bc, mids, nb = _equilateral_patch()
    cfg = limiter.LimiterConfig(kind="tvb_2d", M=0.0, nu=1.5, characteristic=False)
    f = lambda x: 1.0 + x @ g
    ubar = np.array([f(bc)])
    umid = f(mids)[:, None]
    nb_ubar = f(nb)[:, None]
    dhat, engaged = limiter.tvb_limit_2d(verts, ubar, umid, nb, nb_ubar, cfg)
    assert not engaged
    # the reconstruction reproduces the linear increments exactly
    assert np.allclose(dhat[:, 0], f(mids) - f(bc), atol=1e-12)


def test_tvb_2d_extremum_flattened():
    verts, bc, mids, nb = _equilateral_patch()
    cfg = limiter.LimiterConfig(kind="tvb_2d", M=0.0, characteristic=False)
    ubar = np.array([1.0])
    umid = np.array([[1.4], [1.2], [0.9]])
    nb_ubar = np.full((3, 1), 1.0)   # all neighbors equal: slopes must vanish
    dhat, engaged = limiter.tvb_limit_2d(verts, ubar, umid, nb, nb_ubar, cfg)
    assert engaged
    assert np.abs(dhat).max() < 1e-14


def test_characteristic_round_trip():
    u = euler.cons_arr(1.2, np.array([0.4, -0.3]), 2.8, 1.4)
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [-0.6, 0.8]])
    R, L, _ = euler.eigen_arrays(np.tile(u, (3, 1)), dirs, 1.4)
    x = np.random.default_rng(0).normal(size=(3, 4))
    back = np.einsum("nij,nj->ni", R, np.einsum("nij,nj->ni", L, x))
    assert np.abs(back - x).max() < 1e-12


def test_scalar_characteristic_equals_component():
    # for a scalar system the transform is identity, so paths agree
    verts, bc, mids, nb = _equilateral_patch()
    ubar = np.array([1.0])
    umid = np.array([[1.2], [0.8], [1.1]])
    nb_ubar = np.array([[1.3], [0.6], [1.2]])
    out = {}
    for char in (True, False):
        cfg = limiter.LimiterConfig(kind="tvb_2d", M=0.0, characteristic=char)
        dhat, _ = limiter.tvb_limit_2d(verts, ubar, umid, nb, nb_ubar, cfg,
                                       system="scalar")
        out[char] = dhat
    assert np.allclose(out[True], out[False])


def _posit_setup(degree=1):
    basis = dg_basis.basis_for(1, degree)
    pts = np.concatenate([dg_basis.quadrature_for(1, 2 * degree + 1).points,
                          [[-1.0], [1.0]]])
    return basis, pts


def test_positivity_untouched_when_positive():
    basis, pts = _posit_setup()
    phi0 = basis.eval(np.array([[0.0]]))[0, 0]
    C = np.zeros((1, 2, 3))
    C[0, 0] = np.array([1.0, 0.1, 2.0]) / phi0
    C[0, 1] = [0.01, 0.0, 0.01]
    out, n = limiter.positivity_limit(C, basis, pts, 1.4)
    assert n == 0
    assert np.allclose(out, C)


def test_positivity_density_scaling_formula():
    basis, pts = _posit_setup()
    phi0 = basis.eval(np.array([[0.0]]))[0, 0]
    phi1r = basis.eval(np.array([[1.0]]))[0, 1]
    eps = limiter.EPS_POS
    C = np.zeros((1, 2, 3))
    C[0, 0] = np.array([1.0, 0.0, 2.5]) / phi0
    C[0, 1, 0] = 1.1 / phi1r   # rho dips to -0.1 at the right node
    out, n = limiter.positivity_limit(C, basis, pts, 1.4)
    assert n == 1
    theta = (1.0 - eps) / (1.0 - (-0.1))
    assert out[0, 1, 0] == pytest.approx(theta * C[0, 1, 0], rel=1e-10)
    rho_min = (out[0, 0, 0] * phi0) - out[0, 1, 0] * phi1r
    assert rho_min >= eps - 1e-15  # guaranteed bound holds to round-off


def test_positivity_idempotent_and_preserves_averages():
    rng = np.random.default_rng(6)
    basis, pts = _posit_setup(degree=2)
    phi0 = basis.eval(np.array([[0.0]]))[0, 0]
    C = rng.normal(scale=0.8, size=(30, 3, 3))
    C[:, 0, 0] = (np.abs(C[:, 0, 0]) + 0.5) / phi0
    C[:, 0, 2] = (np.abs(C[:, 0, 2]) + 3.0) / phi0
    C[:, 0, 1] = 0.0
    out1, _ = limiter.positivity_limit(C, basis, pts, 1.4)
    out2, n2 = limiter.positivity_limit(out1, basis, pts, 1.4)
    assert n2 == 0
    assert np.allclose(out2, out1)
    assert np.allclose(out1[:, 0, :], C[:, 0, :])
    # all control values physical after limiting
    vals = np.einsum("qm,nmv->nqv", basis.eval(pts), out1)
    assert vals[..., 0].min() >= limiter.EPS_POS * (1 - 1e-12)
    assert euler.pressure_arr(vals, 1.4).min() >= limiter.EPS_POS * (1 - 1e-12)


def test_positivity_fatal_on_bad_average():
    basis, pts = _posit_setup()
    phi0 = basis.eval(np.array([[0.0]]))[0, 0]
    C = np.zeros((1, 2, 3))
    C[0, 0] = np.array([1.0, 3.0, 1.0]) / phi0   # negative pressure average
    with pytest.raises(InvalidStateError):
        limiter.positivity_limit(C, basis, pts, 1.4)


def test_constant_state_unchanged_by_positivity():
    basis, pts = _posit_setup()
    phi0 = basis.eval(np.array([[0.0]]))[0, 0]
    C = np.zeros((5, 2, 3))
    C[:, 0] = np.array([0.7, -0.1, 1.9]) / phi0
    out, n = limiter.positivity_limit(C, basis, pts, 1.4)
    assert n == 0 and np.allclose(out, C)

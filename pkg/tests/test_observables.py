import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import poisson

from qdshuttle import observables as obs
from qdshuttle.classical import trajectory_on
from qdshuttle.core import DomainError, SystemParams
from qdshuttle.driving import NAMED_KINDS, DrivingProfile, Kind, evaluate
from qdshuttle.hermite import hermite_functions

T0 = 2 * math.pi
X = np.linspace(-40, 60, 20001)
DX = X[1] - X[0]


def quadrature_sz(lam, x_c):
    """<sigma_z>/2 of exp(-i x/lam sigma_y) psi_0(x - x_c) chi_up by direct summation."""
    dens = np.exp(-((X - x_c) ** 2)) / math.sqrt(math.pi)
    return 0.5 * float(np.sum(dens * np.cos(2 * X / lam)) * DX)


@dataclass
class FrozenState:
    """Minimal trajectory stand-in with a fixed classical state."""
    x_c: float
    v_c: float
    profile: DrivingProfile

    def state(self, t):
        return self.x_c, self.v_c


def test_spin_at_rest_small_coupling():
    lam = 1 / 0.15708
    traj = trajectory_on(DrivingProfile.static(), [0.0, 1.0])
    sz = obs.spin_expectation(traj, SystemParams(lam), 0.0).sz
    assert sz == pytest.approx(quadrature_sz(lam, 0.0), abs=1e-12)
    assert sz == pytest.approx(0.4878139, abs=1e-7)


def test_spin_at_rest_lambda_10():
    traj = trajectory_on(DrivingProfile.static(), [0.0, 1.0])
    sz = obs.spin_expectation(traj, SystemParams(10.0), 0.0).sz
    assert sz == pytest.approx(quadrature_sz(10.0, 0.0), abs=1e-12)
    assert sz == pytest.approx(0.4950249, abs=1e-7)


@pytest.mark.parametrize("x_c", [0.0, 2.0, 5 * math.pi, 7.3])
def test_spin_matches_quadrature_along_the_line(x_c):
    params = SystemParams(10.0)
    state = FrozenState(x_c, 0.3, DrivingProfile.static())
    assert obs.spin_expectation(state, params, 1.0).sz == pytest.approx(
        quadrature_sz(10.0, x_c), abs=1e-12)


def test_spin_flip_position():
    params = SystemParams(10.0)
    state = FrozenState(5 * math.pi, 0.0, DrivingProfile.static())
    s = obs.spin_expectation(state, params, 1.0)
    assert s.sz == pytest.approx(-0.5 * obs.spin_attenuation(params), abs=1e-15)
    assert s.sy == 0.0


def test_spin_quarter_turn_weak_coupling():
    params = SystemParams(1e6)
    state = FrozenState(math.pi * 1e6 / 4, 0.0, DrivingProfile.static())
    s = obs.spin_expectation(state, params, 1.0)
    assert (s.sx, s.sz) == pytest.approx((0.5, 0.0), abs=1e-9)


def test_spin_without_coupling_stays_up():
    traj = trajectory_on(DrivingProfile(Kind.LINEAR_RAMP, 3.0, T0), [0.0, T0])
    s = obs.spin_expectation(traj, SystemParams(math.inf), np.array([0.0, 1.0]))
    assert np.all(s.sz == 0.5)


def test_pseudo_spin_examples(params10):
    prof = DrivingProfile(Kind.LINEAR_RAMP, 5 * math.pi, T0)
    assert obs.pseudo_spin(prof, params10, 0.0).tz == 0.5
    assert obs.pseudo_spin(prof, params10, T0).tz == pytest.approx(-0.5)
    weak = SystemParams(8e6)
    ramp = DrivingProfile(Kind.LINEAR_RAMP, math.pi * 8e6 / 4, T0)
    p = obs.pseudo_spin(ramp, weak, T0)
    assert (p.tx, p.tz) == pytest.approx((0.5, 0.0), abs=1e-12)


def test_ground_doublet_pseudo_spin_displaced_packet(params10):
    state = FrozenState(1.0, 0.0, DrivingProfile.static())
    tz0 = obs.pseudo_spin_ground(state.profile, state, params10, 0.5).tz
    assert tz0 == pytest.approx(0.5 * math.exp(-0.5), abs=1e-15)
    assert tz0 == pytest.approx(0.30327, abs=1e-5)


def test_ground_doublet_after_fast_ramp(params10):
    prof = DrivingProfile(Kind.LINEAR_RAMP, 5 * math.pi, T0 / 2)
    traj = trajectory_on(prof, [0.0, prof.T])
    tz0 = obs.pseudo_spin_ground(prof, traj, params10, prof.T).tz
    assert abs(tz0) == pytest.approx(0.5 * math.exp(-50), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(kind=st.sampled_from(NAMED_KINDS), r=st.floats(0.1, 5), frac=st.floats(0, 1.5),
       lam=st.floats(0.5, 100), beta=st.floats(0, 3))
def test_full_pseudo_spin_has_magnitude_half(kind, r, frac, lam, beta):
    params = SystemParams(lam, beta)
    prof = DrivingProfile(kind, math.pi * lam / 2, r * T0)
    p = obs.pseudo_spin(prof, params, frac * prof.T)
    assert math.sqrt(p.tx**2 + p.ty**2 + p.tz**2) == pytest.approx(0.5, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(kind=st.sampled_from(NAMED_KINDS), r=st.floats(0.1, 5), frac=st.floats(0, 2),
       lam=st.floats(0.5, 100))
def test_spin_vector_length_is_attenuation(kind, r, frac, lam):
    params = SystemParams(lam, 0.7)
    prof = DrivingProfile(kind, 4.0, r * T0)
    traj = trajectory_on(prof, [0.0, frac * prof.T + 1e-9])
    s = obs.spin_expectation(traj, params, frac * prof.T)
    length = math.sqrt(s.sx**2 + s.sy**2 + s.sz**2)
    assert length == pytest.approx(0.5 * math.exp(-1 / lam**2), rel=1e-12)


def test_adiabatic_limit_spin_tracks_pseudo_spin(params10):
    prof = DrivingProfile(Kind.SINUSOIDAL_SMOOTH, 5 * math.pi, 2 * T0)
    state = FrozenState(evaluate(prof, 3.0), 0.0, prof)
    s = obs.spin_expectation(state, params10, 3.0)
    p = obs.pseudo_spin(prof, params10, 3.0)
    assert s.sz == pytest.approx(p.tz * obs.spin_attenuation(params10), abs=1e-15)


def test_occupations_at_rest(params10):
    traj = trajectory_on(DrivingProfile.static(), [0.0, 1.0])
    occ = obs.occupations(traj, DrivingProfile.static(), params10, 0.5)
    assert occ.p[0] == pytest.approx(1.0)
    assert abs(occ.c[0, obs.UP]) == pytest.approx(1.0)
    assert occ.c[0, obs.DOWN] == 0


def test_occupations_poisson_after_step(params10):
    prof = DrivingProfile(Kind.STEP, math.sqrt(2), 0.0)
    traj = trajectory_on(prof, [0.0, 1.0])
    occ = obs.occupations(traj, prof, params10, 1e-12, n_max=20)
    assert occ.mean_nu == pytest.approx(1.0)
    assert occ.p[0] == pytest.approx(math.exp(-1)) and occ.p[1] == pytest.approx(math.exp(-1))
    np.testing.assert_allclose(occ.p, poisson.pmf(np.arange(21), 1.0), atol=1e-15)


def test_default_truncation_captures_tail(params10):
    prof = DrivingProfile(Kind.LINEAR_RAMP, 5 * math.pi, T0 / 2)
    traj = trajectory_on(prof, [0.0, prof.T])
    occ = obs.occupations(traj, prof, params10, prof.T)
    assert occ.mean_nu == pytest.approx(50.0)
    assert 1 - occ.p.sum() < 1e-10
    with pytest.raises(DomainError):
        obs.occupations(traj, prof, params10, prof.T, n_max=-1)


def test_ground_probability_consistent_with_occupations(params10):
    rng = np.random.default_rng(3)
    for _ in range(100):
        kind = NAMED_KINDS[rng.integers(4)]
        prof = DrivingProfile(kind, rng.uniform(0.5, 20), rng.uniform(0.1, 5) * T0)
        t = rng.uniform(0, 1.5 * prof.T)
        traj = trajectory_on(prof, [0.0, t])
        occ = obs.occupations(traj, prof, params10, t, n_max=0)
        assert occ.p[0] == pytest.approx(obs.ground_probability(traj, t), abs=1e-12)


@pytest.mark.parametrize("kind", NAMED_KINDS)
def test_coefficients_rebuild_the_state(kind):
    params = SystemParams(6.0, 0.4)
    prof = DrivingProfile(kind, 3 * math.pi, 0.8 * T0)
    t = 1.1 * prof.T
    traj = trajectory_on(prof, [0.0, t])
    psi = obs.wavefunction(traj, prof, params, X, t)
    occ = obs.occupations(traj, prof, params, t)
    xi = evaluate(prof, t)
    basis = hermite_functions(occ.n_max, X - xi)
    up = occ.c[:, obs.UP] @ basis
    down = occ.c[:, obs.DOWN] @ basis
    up, down = obs.rotate_spinor(params, (X - xi) / params.lambda_so, up, down)
    overlap = (np.vdot(psi.up, up) + np.vdot(psi.down, down)) * DX
    assert abs(overlap - 1) < 1e-8


def test_energy_examples(params10):
    step = DrivingProfile(Kind.STEP, 5 * math.pi / 2, 0.0)
    traj = trajectory_on(step, [0.0, 1.0])
    excess = obs.energy(traj, step, params10, 1e-12) - params10.E_so - 0.5
    assert excess == pytest.approx((5 * math.pi / 2) ** 2 / 2, rel=1e-9)
    assert excess == pytest.approx(30.84, abs=0.01)
    ramp = DrivingProfile(Kind.LINEAR_RAMP, 5 * math.pi, T0)
    traj = trajectory_on(ramp, [0.0, 3 * T0])
    assert obs.energy(traj, ramp, params10, 3 * T0) == pytest.approx(params10.E_so + 0.5)
    still = trajectory_on(DrivingProfile.static(), [0.0, 1.0])
    e = obs.energy(still, DrivingProfile.static(), params10, np.linspace(0, 50, 11), n=3)
    np.testing.assert_allclose(e, params10.E_so + 3.5, rtol=1e-15)
    with pytest.raises(DomainError):
        obs.energy(still, DrivingProfile.static(), params10, 0.0, n=-1)


@pytest.mark.parametrize("n,s", [(0, obs.UP), (2, obs.DOWN)])
def test_wavefunction_normalised_and_centred(params10, n, s):
    prof = DrivingProfile(Kind.SINUSOIDAL_BROKEN, 5.0, 1.3 * T0)
    traj = trajectory_on(prof, [0.0, 4.0])
    psi = obs.wavefunction(traj, prof, params10, X, 4.0, n=n, s=s)
    assert psi.norm() == pytest.approx(1.0, abs=1e-10)
    x_c, _ = traj.state(4.0)
    np.testing.assert_allclose(psi.density(), hermite_functions(n, X - x_c)[n] ** 2, atol=1e-14)


def test_wavefunction_grid_too_small(params10):
    traj = trajectory_on(DrivingProfile.static(), [0.0, 1.0])
    with pytest.raises(DomainError, match="norm deficit"):
        obs.wavefunction(traj, DrivingProfile.static(), params10, np.linspace(-1, 1, 101), 0.0)

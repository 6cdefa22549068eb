from collections import namedtuple

import pytest
import numpy as np
from numpy.testing import assert_allclose

from schlicht.analytic import LinearFunctional, MapSpec
from schlicht.exceptions import (HorizonExceeded, OutsideDomain,
                                 TailBoundLoose)
from schlicht.loewner import (DrivingFunction, LoewnerChain, SupportPointData,
                              ode_solve, explicit_koebe_chain, h_integrand,
                              variational_integral, theorem2_report,
                              remainder_decay, remark1_check,
                              koebe_oracle_grid)


def koebe(w):
  return w / (1 - w) ** 2


def polar_grid(n_radii=10, n_angles=10, radius=0.9):
  radii = np.linspace(radius / 10, radius, n_radii)
  angles = 2 * np.pi * np.arange(n_angles) / n_angles
  return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


class TestDrivingFunction(object):

  def test_constant(self):
    kappa = DrivingFunction.constant(1j)
    assert_allclose(kappa([0., 10.]), [1j, 1j])
    assert kappa.limit == 1j

  def test_tabulated(self):
    kappa = DrivingFunction.tabulated([0., 1.], [1, 1j])
    assert_allclose(kappa(0.5), np.exp(0.25j * np.pi))
    assert_allclose(kappa(7.), 1j)
    assert kappa.limit == 1j

  def test_not_unimodular(self):
    with pytest.raises(ValueError) as raised_error:
      DrivingFunction.constant(0.5)
    assert 'unimodular' in str(raised_error.value)

  def test_decreasing_times(self):
    with pytest.raises(ValueError):
      DrivingFunction.tabulated([1., 0.], [1, 1])


class TestKoebeChain(object):

  @pytest.mark.parametrize('t', [0.5, 1., 2., 5.])
  def test_oracle_agreement(self, t):
    z = polar_grid()
    assert np.max(np.abs(ode_solve(LoewnerChain(), z, t) -
                         explicit_koebe_chain(z, t))) < 1e-8

  @pytest.mark.parametrize('t', [0.5, 1., 2., 5.])
  def test_conservation(self, t):
    z = polar_grid()
    f = ode_solve(LoewnerChain(), z, t)
    assert_allclose(np.exp(t) * koebe(f), koebe(z), rtol=1e-8)

  def test_oracle_grid(self):
    rows = koebe_oracle_grid(times=(1.,))
    assert len(rows) == 100
    assert max(row['error'] for row in rows) < 1e-8

  def test_explicit_root(self):
    assert_allclose(explicit_koebe_chain(0.5, np.log(2)), (3 - 5 ** .5) / 2)
    assert explicit_koebe_chain(0.3, 0.) == 0.3

  def test_trajectory_matches_solve(self):
    chain = LoewnerChain()
    z = np.array([0.2, -0.5j])
    path = chain.trajectory(z, [0., 1., 2.])
    assert_allclose(path[0], z)
    assert_allclose(path[2], chain.solve(z, 2.), atol=1e-10)

  def test_limit_is_koebe(self):
    chain = LoewnerChain()
    assert_allclose(chain.limit(0.5), 2, rtol=1e-6)
    assert_allclose(chain.limit_map()(0.3j), koebe(0.3j), rtol=1e-6)

  def test_rotated_limit(self):
    support = SupportPointData.rotated_koebe(0.8)
    chain = support.chain()
    z = 0.4 + 0.1j
    assert_allclose(chain.limit(z), support.map(z), rtol=1e-6)

  def test_domain_and_horizon(self):
    chain = LoewnerChain()
    with pytest.raises(OutsideDomain):
      chain.solve(0.97, 1.)
    with pytest.raises(HorizonExceeded):
      chain.solve(0.5, 41.)

  def test_h_integrand(self):
    chain = LoewnerChain()
    z, s, h = 0.4 + 0.2j, 1.5, 1e-3
    F = lambda s: np.exp(s) * chain.solve(z, s)
    assert_allclose(h_integrand(chain, z, s), (F(s + h) - F(s - h)) / (2 * h),
                    rtol=1e-5)


class TestVariationalIntegral(object):

  @pytest.mark.parametrize('t', [0.5, 1., 3.])
  def test_closed_form(self, t):
    chain = LoewnerChain()
    z = polar_grid(5, 5, radius=0.5)
    F_t = np.exp(t) * explicit_koebe_chain(z, t)
    assert_allclose(variational_integral(chain, z, t), (F_t - koebe(z)) / 2,
                    atol=1e-8)

  @pytest.mark.parametrize('t', [1., 2., 3.])
  def test_second_coefficient(self, t):
    L = LinearFunctional.coefficient_index(2)
    values = variational_integral(LoewnerChain(), L.sample_points(), t)
    assert_allclose(L.from_samples(values), -np.exp(-t), atol=1e-9)

  def test_tail_bound(self):
    value, tail = variational_integral(LoewnerChain(), 0.5, 1.,
                                       return_tail=True)
    assert tail < 1e-9
    with pytest.raises(TailBoundLoose):
      variational_integral(LoewnerChain(), 0.5, 1., tail_tol=1e-30)

  def test_short_truncation(self):
    with pytest.raises(ValueError) as raised_error:
      variational_integral(LoewnerChain(), 0.5, 1., T_max=10.)
    assert 'must be at least' in str(raised_error.value)


class TestTailDecomposition(object):

  @pytest.mark.parametrize('t', [1., 2., 3.])
  def test_second_coefficient(self, t):
    support = SupportPointData.rotated_koebe(0.)
    report = theorem2_report(LinearFunctional.coefficient_index(2),
                             support.chain(), support, t)
    assert report.holds(1e-6)
    assert report.closure_residual < 1e-8
    assert_allclose(report.leading, -np.exp(-t), atol=1e-10)
    assert abs(report.second_order) < 1e-10
    assert abs(report.remainder) < 1e-8

  def test_third_coefficient_terms(self):
    support = SupportPointData.rotated_koebe(0.)
    L = LinearFunctional.coefficient_index(3)
    reports = [theorem2_report(L, support.chain(), support, t)
               for t in (1., 2., 3.)]
    for r in reports:
      c = np.exp(-r.t)
      assert_allclose(r.full, -4 * c + 2.5 * c ** 2, atol=1e-8)
      assert_allclose(r.leading, -4 * c, atol=1e-10)
      assert_allclose(r.second_order, 0.5 * c ** 2, atol=1e-8)
      assert_allclose(r.remainder, 2 * c ** 2, atol=1e-8)
      assert r.holds(1e-6)
      assert r.closure_residual < 1e-8
    # the remainder is o(e^{-t})
    for ratio in remainder_decay(reports):
      assert ratio < 1.5 / np.e
      assert_allclose(ratio, np.exp(-2), rtol=1e-4)

  def test_rotated_support_point(self):
    support = SupportPointData.rotated_koebe(np.pi / 3)
    L = LinearFunctional.coefficient_index(2)
    report = theorem2_report(L, support.chain(), support, 2.)
    assert report.closure_residual < 1e-8
    assert_allclose(report.leading, -np.exp(-2.) * np.exp(1j * np.pi / 3),
                    atol=1e-10)

  def test_chain_must_match_support(self):
    support = SupportPointData.rotated_koebe(0.)
    with pytest.raises(ValueError) as raised_error:
      theorem2_report(LinearFunctional.coefficient_index(2),
                      SupportPointData.rotated_koebe(1.).chain(), support, 1.)
    assert 'conj(z0)' in str(raised_error.value)

  def test_remainder_decay_noise_floor(self):
    Report = namedtuple('Report', 'remainder')
    ratios = remainder_decay([Report(1e-3), Report(1e-4), Report(1e-12)])
    assert_allclose(ratios[0], 0.1)
    assert ratios[1] is None


class TestSupportPointData(object):

  def test_rotated_koebe(self):
    support = SupportPointData.rotated_koebe(0.4)
    assert_allclose(support.z0, -np.exp(-0.4j))
    assert_allclose(support.w0, support.z0 / 4)

  def test_rejects_regular_point(self):
    with pytest.raises(ValueError) as raised_error:
      SupportPointData(MapSpec.identity(), 1.)
    assert 'not the preimage' in str(raised_error.value)

  def test_rejects_interior_point(self):
    with pytest.raises(ValueError):
      SupportPointData(MapSpec.koebe(), 0.5)


class TestRemark1(object):

  def test_sign_change(self):
    rows = {row['map']: row for row in remark1_check()}
    assert_allclose(rows['koebe']['L(f^2)'], 1, atol=1e-10)
    assert_allclose(rows['rotated_koebe_pi']['L(f^2)'], 1, atol=1e-10)
    assert_allclose(rows['koebe']['Re L(conj(z0) f^2)'], -1, atol=1e-10)
    assert_allclose(rows['rotated_koebe_pi']['Re L(conj(z0) f^2)'], 1,
                    atol=1e-10)

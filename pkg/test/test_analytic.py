import pytest
import numpy as np
from numpy.testing import assert_allclose
from sklearn.utils import check_random_state

from schlicht.analytic import (OmittedPair, BranchPath, MapSpec,
                               LinearFunctional, continue_psi, psi_eval,
                               psi_prime, eval_map, coefficients, coefficient,
                               apply_functional, perturbation_radius)
from schlicht.exceptions import (InvalidPair, PathHitsBranchPoint,
                                 DerivativeSingular, OutsideDomain,
                                 DerivativeVanishesOnBoundary)

SEED = 42
RNG = check_random_state(SEED)


def random_pairs(n_pairs):
  radius = RNG.uniform(0.5, 3, n_pairs)
  theta = RNG.uniform(-np.pi, np.pi, n_pairs)
  gap = RNG.uniform(0.2, 2 * np.pi - 0.2, n_pairs)
  return [OmittedPair(r * np.exp(1j * t), r * np.exp(1j * (t - g)))
          for r, t, g in zip(radius, theta, gap)]


class TestOmittedPair(object):

  def test_psi0_is_principal_root(self):
    pair = OmittedPair(2, -2)
    assert pair.psi0 == 2j
    assert pair.psi_prime0 == 0

  @pytest.mark.parametrize('alpha, beta, reason',
                           [(2, 2, 'alpha equals beta'),
                            (2, 1j, '|alpha| != |beta|'),
                            (np.inf, 1, 'values must be finite')])
  def test_invalid_pairs(self, alpha, beta, reason):
    with pytest.raises(InvalidPair) as raised_error:
      OmittedPair(alpha, beta)
    assert reason in str(raised_error.value)

  def test_angles_are_ordered(self):
    for pair in random_pairs(20):
      assert 0 < pair.theta - pair.phi < 2 * np.pi
      assert_allclose(np.exp(1j * pair.phi) * pair.radius, pair.beta,
                      atol=1e-12)

  def test_psi_prime0_modulus(self):
    for pair in random_pairs(20):
      assert_allclose(abs(pair.psi_prime0),
                      abs(np.cos((pair.theta - pair.phi) / 2)), atol=1e-12)

  def test_check_clear(self):
    pair = OmittedPair(1, 1j)
    pair.check_clear([0, 0.5])
    with pytest.raises(PathHitsBranchPoint):
      pair.check_clear([0, 1j + 1e-14])


class TestContinuation(object):

  def test_along_imaginary_axis(self):
    assert_allclose(psi_eval(OmittedPair(2, -2), 2j), 2 ** 1.5 * 1j,
                    atol=1e-12)

  def test_squares_to_product(self):
    pair = OmittedPair(2, -2)
    w = RNG.uniform(-1, 1, 10) + 1j * RNG.uniform(-1, 1, 10)
    for wk in w:
      assert_allclose(psi_eval(pair, wk) ** 2, pair.squared(wk), atol=1e-12)

  def test_loop_around_branch_point_flips_sign(self):
    pair = OmittedPair(2, -2)
    loop = BranchPath.through([0, 1, 2 + 1j, 3, 2 - 1j, 1, 0])
    assert_allclose(psi_eval(pair, 0, loop), -pair.psi0, atol=1e-12)

  def test_loop_around_both_branch_points_keeps_sign(self):
    pair = OmittedPair(2, -2)
    loop = BranchPath.through([0, 3j, -3 + 3j, -3 - 3j, 3 - 3j, 3 + 3j, 3j,
                               0])
    assert_allclose(psi_eval(pair, 0, loop), pair.psi0, atol=1e-12)

  def test_path_through_branch_point(self):
    with pytest.raises(PathHitsBranchPoint):
      psi_eval(OmittedPair(2, -2), 4)

  def test_path_must_start_at_zero(self):
    with pytest.raises(ValueError) as raised_error:
      psi_eval(OmittedPair(2, -2), 1, BranchPath.segment(0.5, 1))
    assert 'must start at 0' in str(raised_error.value)

  def test_many_paths_match_single_paths(self):
    pair = OmittedPair(2, -2)
    targets = np.array([0.5, 1j, -0.3 + 0.7j])
    t = np.linspace(0, 1, 129)
    batch = continue_psi(pair, targets[:, None] * t[None, :], pair.psi0)
    for k, target in enumerate(targets):
      assert_allclose(batch[k, -1], psi_eval(pair, target), atol=1e-12)

  def test_step_bound(self):
    with pytest.raises(ValueError) as raised_error:
      BranchPath([0, 1], step_bound=0.5)
    assert 'exceed the step bound' in str(raised_error.value)

  def test_psi_prime(self):
    pair = OmittedPair(2, -2)
    w = 1j
    assert_allclose(psi_prime(pair, w, psi_eval(pair, w)),
                    w / psi_eval(pair, w))
    with pytest.raises(DerivativeSingular):
      psi_prime(pair, 2, 0)


class TestMapSpec(object):

  @pytest.mark.parametrize('name', ['identity', 'koebe', 'half-plane',
                                    'rotated-koebe:0.7',
                                    'polynomial:0.2,0.1-0.05i'])
  def test_normalized(self, name):
    f = MapSpec.from_name(name)
    assert_allclose(f(0), 0, atol=1e-15)
    assert_allclose(f.derivative(0), 1, atol=1e-15)

  @pytest.mark.parametrize('name', ['koebe', 'half-plane', 'rotated-koebe:2',
                                    'polynomial:0.3i,0.1'])
  def test_derivative_matches_difference_quotient(self, name):
    f = MapSpec.from_name(name)
    z = 0.3 + 0.4j
    h = 1e-6
    assert_allclose(f.derivative(z), (f(z + h) - f(z - h)) / (2 * h),
                    rtol=1e-8)

  def test_values(self):
    assert eval_map(MapSpec.koebe(), 0.5) == 2
    assert_allclose(MapSpec.rotated_koebe(np.pi)(0.5), 0.5 / 1.5 ** 2)
    assert_allclose(MapSpec.rotated_koebe(0.9).tip_preimage,
                    -np.exp(-0.9j))

  def test_unknown_name(self):
    with pytest.raises(ValueError) as raised_error:
      MapSpec.from_name('mobius')
    assert 'Unknown map' in str(raised_error.value)

  def test_outside_domain(self):
    with pytest.raises(OutsideDomain):
      eval_map(MapSpec.koebe(), [0.1, 1.0])


class TestCoefficients(object):

  def test_koebe(self):
    assert_allclose(coefficients(MapSpec.koebe(), 6), np.arange(7),
                    atol=1e-10)

  def test_polynomial(self):
    f = MapSpec.polynomial([0.25, -0.5j])
    assert_allclose(coefficient(f, 3), -0.5j, atol=1e-12)
    assert_allclose(coefficient(f, 4), 0, atol=1e-12)

  @pytest.mark.parametrize('radius', [0, 1, 1.5])
  def test_radius_range(self, radius):
    with pytest.raises(ValueError):
      coefficients(MapSpec.koebe(), 2, radius=radius)

  def test_samples_power_of_two(self):
    with pytest.raises(ValueError) as raised_error:
      coefficients(MapSpec.koebe(), 2, samples=100)
    assert 'power of two' in str(raised_error.value)


class TestLinearFunctional(object):

  def test_parse(self):
    assert LinearFunctional.from_string('a2').kind == 'coefficient'
    L = LinearFunctional.from_string('0.5a2+(1+1i)a3')
    assert L.kind == 'combination'
    assert L.terms == ((2, 0.5), (3, 1 + 1j))
    P = LinearFunctional.from_string('point:0.1+0.2i')
    assert P.kind == 'point' and P.point == 0.1 + 0.2j

  @pytest.mark.parametrize('text', ['b2', 'a', '0.5a2+', 'point:2'])
  def test_parse_errors(self, text):
    with pytest.raises(ValueError):
      LinearFunctional.from_string(text)

  def test_values_on_koebe(self):
    L = LinearFunctional.from_string('0.5a2+(1+1i)a3')
    assert_allclose(L(MapSpec.koebe()), 1 + 3 * (1 + 1j), atol=1e-10)
    P = LinearFunctional.point_evaluation(0.5, weight=2)
    assert_allclose(P(MapSpec.koebe()), 4)

  def test_on_coefficients_matches_sampling(self):
    a = np.array([0, 1, 0.2 - 0.1j, 0.05j])
    f = MapSpec.polynomial(a[2:])
    for text in ['a2', '2a3-1ia2', 'point:0.3-0.3i']:
      L = LinearFunctional.from_string(text)
      assert_allclose(L.on_coefficients(a), apply_functional(L, f),
                      atol=1e-12)

  def test_rotation(self):
    L = LinearFunctional.coefficient_index(2)
    rotated = complex(np.exp(0.3j)) * L
    assert rotated.kind == 'combination'
    assert_allclose(rotated(MapSpec.koebe()), 2 * np.exp(0.3j), atol=1e-10)
    assert (1 * L).kind == 'coefficient'

  def test_str_round_trip(self):
    L = LinearFunctional.from_string('0.5a2-2ia4')
    again = LinearFunctional.from_string(str(L))
    assert again.terms == L.terms


class TestPerturbationRadius(object):

  def test_identity_and_square(self):
    delta = perturbation_radius(MapSpec.identity(), lambda z: z ** 2,
                                g_prime=lambda z: 2 * z)
    assert_allclose(delta, 0.5, rtol=0.05)

  def test_polynomial_perturbation(self):
    delta = perturbation_radius(MapSpec.identity(),
                                MapSpec.from_name('polynomial:1'))
    assert_allclose(delta, 1. / 3, rtol=1e-12)

  def test_boundary_critical_point(self):
    with pytest.raises(DerivativeVanishesOnBoundary):
      perturbation_radius(MapSpec.polynomial([0.5]), lambda z: z ** 2)

  def test_constant_perturbation(self):
    assert perturbation_radius(MapSpec.identity(), np.zeros_like,
                               g_prime=np.zeros_like, cap=10.) == 10.

  def test_small_grid(self):
    with pytest.raises(ValueError):
      perturbation_radius(MapSpec.identity(), np.zeros_like, gridsize=4)

import pytest
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils import check_random_state

from schlicht.analytic import LinearFunctional
from schlicht.exceptions import (ConstantFunctional, InconclusiveOnBoundary,
                                 NotAZero)
from schlicht.polyext import (PolynomialCandidate, ExtremalSearch,
                              boundary_self_intersection,
                              brute_force_self_intersection,
                              segments_intersect, derivative_winding,
                              min_boundary_separation, is_univalent,
                              boundary_derivative_min, boundary_zero_angles,
                              boundary_derivative_trace,
                              zero_simplicity_check, maximize_functional,
                              neighbor_self_intersection,
                              retract_to_certified)

SEED = 42
RNG = check_random_state(SEED)


def angle_gap(a, b):
  return abs(np.angle(np.exp(1j * (a - b))))


def lemniscate(n_points=64):
  t = 2 * np.pi * (np.arange(n_points) + 0.5) / n_points
  return np.sin(t) + 1j * np.sin(t) * np.cos(t)


class TestPolynomialCandidate(object):

  def test_vector_round_trip(self):
    p = PolynomialCandidate([0.1 - 0.2j, 0.05j], 3)
    assert_array_equal(p.to_vector(), [0.1, -0.2, 0., 0.05])
    again = PolynomialCandidate.from_vector(p.to_vector(), 3)
    assert_array_equal(again.coefficients, p.coefficients)

  def test_evaluation(self):
    p = PolynomialCandidate([0.5])
    assert p(2) == 4
    assert p.derivative(2) == 3
    assert p.derivative(2, order=2) == 1
    assert_allclose(p.derivative_roots(), [-1])

  def test_degree_cap(self):
    with pytest.raises(ValueError) as raised_error:
      PolynomialCandidate([0.1, 0.1, 0.1], 3)
    assert 'exceed the degree cap' in str(raised_error.value)

  def test_as_map(self):
    p = PolynomialCandidate([0.2j, 0.1])
    z = 0.3 - 0.4j
    assert_allclose(p.as_map()(z), p(z))


class TestSelfIntersection(object):

  def test_lemniscate(self):
    points = lemniscate()
    assert boundary_self_intersection(points) == (31, 63)
    assert brute_force_self_intersection(points) == (31, 63)

  def test_point_pairs_input(self):
    w = lemniscate()
    points = np.stack([w.real, w.imag], axis=1)
    assert boundary_self_intersection(points) == (31, 63)

  @pytest.mark.parametrize('trial', range(5))
  def test_star_shaped_polygons(self, trial):
    angles = 2 * np.pi * np.arange(64) / 64
    radii = 1 + 0.5 * RNG.uniform(size=64)
    points = radii * np.exp(1j * angles)
    assert boundary_self_intersection(points) is None
    assert brute_force_self_intersection(points) is None

  @pytest.mark.parametrize('trial', range(5))
  def test_random_polylines(self, trial):
    points = RNG.uniform(-1, 1, 20) + 1j * RNG.uniform(-1, 1, 20)
    witness = boundary_self_intersection(points)
    assert (witness is None) == (brute_force_self_intersection(points) is
                                 None)
    if witness is not None:
      pts = np.stack([points.real, points.imag], axis=1)
      i, j = witness
      assert segments_intersect(pts[i], pts[(i + 1) % 20], pts[j],
                                pts[(j + 1) % 20])

  def test_too_few_points(self):
    with pytest.raises(ValueError) as raised_error:
      boundary_self_intersection(np.exp(2j * np.pi * np.arange(6) / 6))
    assert 'at least 8 points' in str(raised_error.value)

  def test_touching_segments(self):
    assert segments_intersect((0, 0), (2, 0), (1, 0), (1, 1))
    assert not segments_intersect((0, 0), (1, 0), (2, 0), (3, 0))

  def test_array_endpoints(self):
    p1, q1 = np.array([0., 0.]), np.array([1., 1.])
    p2, q2 = np.array([0., 1.]), np.array([1., 0.])
    assert segments_intersect(p1, q1, p2, q2)
    assert not segments_intersect(p1, q1, p2 + 2, q2 + 2)
    assert segments_intersect(p1, q1, q1, q1 + 1)


class TestNeighborSelfIntersection(object):

  def test_lemniscate(self):
    assert neighbor_self_intersection(lemniscate()) == (31, 63)

  @pytest.mark.parametrize('trial', range(10))
  def test_agrees_with_brute_force(self, trial):
    points = RNG.uniform(-1, 1, 30) + 1j * RNG.uniform(-1, 1, 30)
    assert neighbor_self_intersection(points) == \
        brute_force_self_intersection(points)

  @pytest.mark.parametrize('trial', range(3))
  def test_star_shaped_polygons(self, trial):
    angles = 2 * np.pi * np.arange(128) / 128
    points = (1 + 0.5 * RNG.uniform(size=128)) * np.exp(1j * angles)
    assert neighbor_self_intersection(points) is None

  def test_long_edges(self):
    # edge 8 is three times longer than edge 0 and crosses it at 0.5
    points = np.array([0, 1, 2, 3, 3 + 1j, 2 + 1j, 1 + 1j, 1.2 - 1j,
                       0.5 - 1j, 0.5 + 2j])
    assert neighbor_self_intersection(points) == (0, 8)
    assert brute_force_self_intersection(points) == (0, 8)

  def test_too_few_points(self):
    with pytest.raises(ValueError) as raised_error:
      neighbor_self_intersection(np.exp(2j * np.pi * np.arange(6) / 6))
    assert 'at least 8 points' in str(raised_error.value)


class TestDerivativeWinding(object):

  @pytest.mark.parametrize('coefficients, expected',
                           [([0.51], 1), ([0.49], 0), ([0, 0.4], 2),
                            ([0, 0.3], 0)])
  def test_counts(self, coefficients, expected):
    p = PolynomialCandidate(coefficients)
    assert derivative_winding(p, 1024) == expected

  def test_zero_on_circle(self):
    with pytest.raises(InconclusiveOnBoundary):
      derivative_winding(PolynomialCandidate([0.5]), 1024)

  def test_shrunken_circle(self):
    p = PolynomialCandidate([0.5])
    assert derivative_winding(p, 1024, radius=1 - 1e-6) == 0

  def test_coarse_grid_zero_near_circle(self):
    # zero of p' at radius 0.999
    p = PolynomialCandidate([0.5 / 0.999])
    assert derivative_winding(p, 16) == 1


class TestUnivalence(object):

  @pytest.mark.parametrize('a2, verdict', [(0.49, 'certified'),
                                           (0.498, 'certified'),
                                           (0.502, 'rejected'),
                                           (0.51, 'rejected')])
  def test_second_coefficient_family(self, a2, verdict):
    assert is_univalent(PolynomialCandidate([a2]), 4096).verdict == verdict

  def test_rejection_witness(self):
    certificate = is_univalent([0.6j])
    assert certificate.witness['kind'] == 'winding'
    assert certificate.derivative_winding == 1

  def test_boundary_zero(self):
    certificate = is_univalent(PolynomialCandidate([0, 1. / 3]))
    assert certificate.winding_radius == 1 - 1e-6
    assert certificate.certified

  def test_resolution(self):
    certificate = is_univalent(PolynomialCandidate([0.1]), 1024)
    assert_allclose(certificate.resolution, 2 * np.pi / 1024)
    assert certificate.to_dict()['boundary_samples'] == 1024

  @pytest.mark.parametrize('M', [256, 1025])
  def test_invalid_resolution(self, M):
    with pytest.raises(ValueError):
      is_univalent(PolynomialCandidate([0.1]), M)

  def test_single_switch(self):
    verdicts = [is_univalent(PolynomialCandidate([a2]), 4096).verdict
                for a2 in np.linspace(0.45, 0.55, 20)]
    assert set(verdicts) == {'certified', 'rejected'}
    switch = verdicts.index('rejected')
    assert verdicts[:switch] == ['certified'] * switch
    assert verdicts[switch:] == ['rejected'] * (20 - switch)
    assert switch == 10

  @pytest.mark.parametrize('M', [512, 2048])
  @pytest.mark.parametrize('coefficients', [[0.3], [0.45j], [0.55],
                                            [-0.7j], [0, 0.3],
                                            [0.1, 0.4j]])
  def test_resolution_doubling_agrees(self, M, coefficients):
    p = PolynomialCandidate(coefficients)
    assert is_univalent(p, M).verdict == is_univalent(p, 2 * M).verdict

  def test_retract_to_certified(self):
    q, certificate = retract_to_certified(PolynomialCandidate([0.51]))
    assert certificate.certified
    assert 0.49 < abs(q.coefficients[0]) < 0.5 + 1e-9
    assert is_univalent(q).certified

  def test_retract_keeps_certified(self):
    p = PolynomialCandidate([0.2, 0.1j])
    q, certificate = retract_to_certified(p, 1024)
    assert q is p
    assert certificate.boundary_samples == 1024

  def test_separation_of_identity(self):
    z = np.exp(2j * np.pi * np.arange(512) / 512)
    assert_allclose(min_boundary_separation(z, z.copy()), 1)


class TestBoundaryDerivative(object):

  def test_minimum(self):
    value, angle = boundary_derivative_min(PolynomialCandidate([0.5]))
    assert value < 1e-6
    assert angle_gap(angle, np.pi) < 1e-6

  def test_zero_angles(self):
    zeros = boundary_zero_angles(PolynomialCandidate([0, 1. / 3]))
    assert len(zeros) == 2
    assert_allclose([z.angle for z in zeros], [np.pi / 2, 3 * np.pi / 2],
                    atol=1e-6)

  def test_no_zero(self):
    assert boundary_zero_angles(PolynomialCandidate([0.2])) == []

  def test_simplicity(self):
    assert_allclose(zero_simplicity_check(PolynomialCandidate([0.5]), np.pi),
                    1)
    assert_allclose(zero_simplicity_check(PolynomialCandidate([0, 1. / 3]),
                                          np.pi / 2), 2)

  @pytest.mark.parametrize('psi', [0, np.pi / 3, np.pi])
  def test_third_coefficient_extremal_zeros(self, psi):
    p = PolynomialCandidate([0, np.exp(1j * psi) / 3])
    angles = [z.angle for z in boundary_zero_angles(p)]
    assert len(angles) == 2
    assert_allclose(angle_gap(angles[0], angles[1]), np.pi, atol=1e-6)
    predicted = (np.pi - psi) / 2
    for angle in angles:
      assert min(angle_gap(angle, predicted),
                 angle_gap(angle, predicted + np.pi)) < 1e-6
      assert_allclose(zero_simplicity_check(p, angle), 2, rtol=1e-6)

  def test_not_a_zero(self):
    with pytest.raises(NotAZero):
      zero_simplicity_check(PolynomialCandidate([0.5]), 0.)

  def test_trace(self):
    rows = boundary_derivative_trace(PolynomialCandidate([0.5]), 8)
    assert len(rows) == 8
    assert_allclose(rows[0]['abs_derivative'], 2)
    assert_allclose(rows[4]['abs_derivative'], 0, atol=1e-12)


class TestExtremalSearch(object):

  def test_second_coefficient(self):
    L = LinearFunctional.coefficient_index(2)
    search = ExtremalSearch(n_starts=4).fit(L, 2)
    result = search.result_
    assert_allclose(result.objective, 0.5, atol=1e-6)
    assert result.certificate.verdict != 'rejected'
    assert len(result.zero_angles) >= 1
    predicted = np.mod(np.pi - result.phase, 2 * np.pi)
    assert min(angle_gap(a, predicted) for a in result.zero_angles) < 1e-5
    assert result.simple_zeros()

  def test_simplicity_values(self):
    result = maximize_functional(LinearFunctional.coefficient_index(2), 2,
                                 n_starts=4)
    assert result.certificate.certified
    assert len(result.second_derivative_at_zeros) == len(result.zero_angles)
    for angle, value in zip(result.zero_angles,
                            result.second_derivative_at_zeros):
      assert value == zero_simplicity_check(result.polynomial, angle)
      assert_allclose(value, 1, rtol=1e-3)

  @pytest.mark.parametrize('psi', [0, np.pi / 3, np.pi])
  def test_rotated_functional(self, psi):
    L = LinearFunctional.coefficient_index(2) * complex(np.exp(1j * psi))
    result = maximize_functional(L, 2, n_starts=4, objective='real')
    assert_allclose(result.objective, 0.5, atol=1e-6)
    assert_allclose(result.polynomial.coefficients[0],
                    0.5 * np.exp(-1j * psi), atol=1e-2)
    assert min(angle_gap(a, np.pi + psi) for a in result.zero_angles) < 1e-2

  def test_real_objective(self):
    L = LinearFunctional.coefficient_index(2)
    result = maximize_functional(L, 2, n_starts=4, objective='real')
    assert_allclose(result.functional_value.real, 0.5, atol=1e-6)
    assert angle_gap(result.boundary_derivative_angle, np.pi) < 1e-2

  @pytest.mark.parametrize('j', [0, 1])
  def test_constant_functional(self, j):
    with pytest.raises(ConstantFunctional):
      ExtremalSearch(n_starts=2).fit(LinearFunctional.coefficient_index(j), 2)

  def test_beyond_degree_cap_is_constant(self):
    with pytest.raises(ConstantFunctional):
      ExtremalSearch(n_starts=2).fit(LinearFunctional.coefficient_index(4), 3)

  def test_deterministic(self):
    L = LinearFunctional.coefficient_index(2)
    first = ExtremalSearch(n_starts=3, random_state=7).fit(L, 2)
    second = ExtremalSearch(n_starts=3, random_state=7).fit(L, 2)
    assert_array_equal(first.result_.polynomial.coefficients,
                       second.result_.polynomial.coefficients)

  def test_invalid_parameters(self):
    L = LinearFunctional.coefficient_index(2)
    with pytest.raises(ValueError):
      ExtremalSearch(objective='imag').fit(L, 2)
    with pytest.raises(ValueError):
      ExtremalSearch().fit(L, 1)

  def test_convergence_warning(self):
    L = LinearFunctional.coefficient_index(2)
    with pytest.warns(ConvergenceWarning):
      ExtremalSearch(n_starts=1, max_iter=1).fit(L, 2)

  def test_verbose(self, capsys):
    ExtremalSearch(n_starts=2, verbose=True).fit(
        LinearFunctional.coefficient_index(2), 2)
    out, _ = capsys.readouterr()
    assert '[ExtremalSearch] start 1/2' in out
    assert '[ExtremalSearch] best candidate certified at M=4096' in out

  def test_to_dict(self):
    result = maximize_functional(LinearFunctional.coefficient_index(2), 2,
                                 n_starts=2)
    doc = result.to_dict()
    assert doc['functional'] == 'a2'
    assert doc['polynomial']['degree_cap'] == 2
    assert doc['certificate']['boundary_samples'] == 4096

  @pytest.mark.integration
  def test_third_coefficient(self):
    result = maximize_functional(LinearFunctional.coefficient_index(3), 3,
                                 n_starts=16)
    assert_allclose(result.objective, 1. / 3, atol=1e-3)
    assert result.objective <= 1. / 3 + 1e-6
    assert result.certificate.certified
    assert result.certificate.boundary_samples == 4096
    assert len(result.zero_angles) >= 1
    assert result.simple_zeros()

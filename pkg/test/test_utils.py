import json

import pytest
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from schlicht._util import (parse_complex, format_complex, check_points,
                            unwrap_scalar, check_power_of_two,
                            check_tolerance, circle_nodes, to_jsonable)
from schlicht.exceptions import OutsideDomain


@pytest.mark.parametrize('text, expected', [
    ('2', 2), ('-0.5+1.5i', -0.5 + 1.5j), ('2i', 2j), ('i', 1j),
    ('-i', -1j), ('1e-3-2e2j', 1e-3 - 200j), (' 1 + 1i ', 1 + 1j),
    ('0.5i', 0.5j)])
def test_parse_complex(text, expected):
  assert parse_complex(text) == expected


@pytest.mark.parametrize('text', ['', '2+', 'x', '1+2k', '1ii'])
def test_parse_complex_malformed(text):
  with pytest.raises(ValueError):
    parse_complex(text)


def test_format_complex_is_inverse():
  for value in [0.1 + 0.2j, -3 - 1e-17j, 2j, 1.]:
    assert parse_complex(format_complex(value)) == value
  assert format_complex(0.5 - 0.25j) == '0.5-0.25i'


class TestCheckPoints(object):

  def test_scalar(self):
    points, scalar = check_points(0.5j)
    assert scalar
    assert_array_equal(points, [0.5j])
    assert unwrap_scalar(points * 2, scalar) == 1j

  def test_array(self):
    points, scalar = check_points([[0.1, 0.2], [0.3j, 0]])
    assert not scalar
    assert points.shape == (4,)
    assert unwrap_scalar(points, scalar) is points

  def test_outside(self):
    with pytest.raises(OutsideDomain):
      check_points([0.5, 1.])
    check_points([0.5, 1.], closed=True)
    with pytest.raises(OutsideDomain):
      check_points(0.96, bound=0.95, closed=True)

  def test_non_finite(self):
    with pytest.raises(ValueError) as raised_error:
      check_points([0.1, np.nan], name='w')
    assert 'w contains non-finite values' in str(raised_error.value)

  def test_empty(self):
    points, _ = check_points([])
    assert points.size == 0


def test_check_power_of_two():
  assert check_power_of_two(256, 'samples') == 256
  with pytest.raises(ValueError) as raised_error:
    check_power_of_two(100, 'samples')
  assert 'power of two' in str(raised_error.value)
  with pytest.raises(ValueError):
    check_power_of_two(32, 'samples')


def test_check_tolerance():
  assert check_tolerance(1e-9, 'tol') == 1e-9
  for bad in [0, -1e-3]:
    with pytest.raises(ValueError):
      check_tolerance(bad, 'tol')


def test_circle_nodes():
  theta, z = circle_nodes(4, radius=2.)
  assert_allclose(theta, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
  assert_allclose(z, [2, 2j, -2, -2j], atol=1e-15)


class TestToJsonable(object):

  def test_nested(self):
    obj = {'a': np.array([1 + 2j, 3]), 'b': (np.float64(0.5), np.int64(2)),
           1: np.bool_(True)}
    out = to_jsonable(obj)
    assert out == {'a': [{'re': 1., 'im': 2.}, {'re': 3., 'im': 0.}],
                   'b': [0.5, 2], '1': True}
    json.dumps(out)

  def test_infinities(self):
    assert to_jsonable([np.inf, -np.inf, np.nan]) == ['inf', '-inf', 'nan']

  def test_objects_with_to_dict(self):

    class Node(object):

      def to_dict(self):
        return {'value': 1j}

    assert to_jsonable([Node()]) == [{'value': {'re': 0., 'im': 1.}}]

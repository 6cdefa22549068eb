import re

import numpy as np
from sklearn.utils import check_scalar

from .exceptions import OutsideDomain

_IMAG_UNIT = re.compile(r'(?<![0-9.eE])([ij])')


def parse_complex(text):
  """Parse a complex literal written as ``a+bi``.

  Accepts ``i`` or ``j`` as the imaginary unit, a bare unit (``i``, ``-i``)
  and purely real or purely imaginary values.

  Examples
  --------
  >>> parse_complex('2')
  (2+0j)
  >>> parse_complex('-0.5+1.5i')
  (-0.5+1.5j)
  >>> parse_complex('2i')
  2j
  """
  if isinstance(text, (int, float, complex, np.number)):
    return complex(text)
  literal = str(text).strip().replace(' ', '')
  if not literal:
    raise ValueError('Empty complex literal.')
  literal = _IMAG_UNIT.sub(r'1\1', literal).replace('i', 'j')
  try:
    return complex(literal)
  except ValueError:
    raise ValueError("Malformed complex literal {!r}; expected the form "
                     "a+bi.".format(text))


def format_complex(value):
  """Inverse of :func:`parse_complex`, at full precision."""
  value = complex(value)
  return '{!r}{}{!r}i'.format(value.real, '-' if value.imag < 0 else '+',
                              abs(value.imag))


def check_points(z, bound=1., closed=False, name='z'):
  """Converts `z` to a 1D complex array and checks it lies in the disk.

  Parameters
  ----------
  z : complex or array-like of complex
    The point(s) to check.

  bound : float
    Radius of the admissible disk.

  closed : bool
    Whether points with ``|z| == bound`` are admitted.

  Returns
  -------
  points : `numpy.ndarray`, shape=(n_points,)
  scalar : bool
    True if `z` was a scalar, so callers can unwrap their result.
  """
  points = np.asarray(z, dtype=complex)
  scalar = points.ndim == 0
  points = np.atleast_1d(points).ravel()
  if not np.all(np.isfinite(points)):
    raise ValueError('{} contains non-finite values.'.format(name))
  if points.size:
    radius = np.abs(points).max()
    if radius > bound or (radius == bound and not closed):
      raise OutsideDomain(radius, bound)
  return points, scalar


def unwrap_scalar(values, scalar):
  return complex(values[0]) if scalar else values


def check_power_of_two(value, name, minimum=64):
  check_scalar(value, name, (int, np.integer), min_val=minimum)
  if value & (value - 1):
    raise ValueError('{} must be a power of two, got {}.'.format(name, value))
  return int(value)


def check_tolerance(value, name):
  check_scalar(value, name, (int, float, np.floating), min_val=0,
               include_boundaries='neither')
  return float(value)


def circle_nodes(samples, radius=1.):
  """Equispaced angles and points ``radius * exp(i theta_k)``."""
  theta = 2 * np.pi * np.arange(samples) / samples
  return theta, radius * np.exp(1j * theta)


def to_jsonable(obj):
  """Recursively converts numpy scalars/arrays and complex numbers into
  objects :mod:`json` can serialize; complex values become
  ``{"re": x, "im": y}`` and infinities become strings."""
  if isinstance(obj, dict):
    return {str(k): to_jsonable(v) for k, v in obj.items()}
  if isinstance(obj, (list, tuple)):
    return [to_jsonable(v) for v in obj]
  if isinstance(obj, np.ndarray):
    return [to_jsonable(v) for v in obj.tolist()]
  if isinstance(obj, (complex, np.complexfloating)):
    return {'re': to_jsonable(float(obj.real)),
            'im': to_jsonable(float(obj.imag))}
  if isinstance(obj, (np.bool_, bool)):
    return bool(obj)
  if isinstance(obj, (np.integer,)):
    return int(obj)
  if isinstance(obj, (float, np.floating)):
    obj = float(obj)
    if np.isfinite(obj):
      return obj
    return 'inf' if obj > 0 else ('-inf' if obj < 0 else 'nan')
  if hasattr(obj, 'to_dict'):
    return to_jsonable(obj.to_dict())
  return obj

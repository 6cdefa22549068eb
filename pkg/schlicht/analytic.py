"""
Complex-analytic primitives shared by the other modules: the branch of
sqrt((w - alpha)(w - beta)) tracked by continuation, a catalog of
normalized univalent maps, Cauchy-integral coefficient extraction and
continuous linear functionals.
"""
import numbers
import re

import numpy as np
from numpy.polynomial import polynomial as P
from sklearn.utils import check_scalar

from ._util import (check_points, unwrap_scalar, check_power_of_two,
                    circle_nodes, parse_complex, format_complex)
from .exceptions import (InvalidPair, PathHitsBranchPoint,
                         AmbiguousContinuation, DerivativeSingular,
                         OutsideDomain, DerivativeVanishesOnBoundary)

BRANCH_TOL = 1e-12
STEP_FRACTION = 1e-2
MAX_SUBDIVISIONS = 100000
DEFAULT_RADIUS = 0.5
DEFAULT_SAMPLES = 256
FD_STEP = 1e-5


class OmittedPair(object):
  """Two omitted values of equal modulus and the bookkeeping for the branch
  of ``Psi(w) = sqrt((w - alpha)(w - beta))``.

  Parameters
  ----------
  alpha, beta : complex
    The omitted values. They must differ and have the same modulus.

  tol : float, optional (default=1e-12)
    Relative tolerance of the equal-modulus test, also used as the
    branch-point proximity tolerance.

  Attributes
  ----------
  theta, phi : float
    Arguments of `alpha` and `beta`, ordered so that
    ``0 < theta - phi < 2 pi``.

  psi0 : complex
    ``Psi(0)``, the principal square root of ``alpha * beta``.

  Examples
  --------
  >>> pair = OmittedPair(2, -2)
  >>> pair.psi0
  2j
  """

  def __init__(self, alpha, beta, tol=BRANCH_TOL):
    alpha, beta = complex(alpha), complex(beta)
    if not (np.isfinite(alpha) and np.isfinite(beta)):
      raise InvalidPair(alpha, beta, 'values must be finite')
    scale = max(1., abs(alpha), abs(beta))
    if abs(alpha - beta) <= tol * scale:
      raise InvalidPair(alpha, beta, 'alpha equals beta')
    if abs(abs(alpha) - abs(beta)) > tol * scale:
      raise InvalidPair(alpha, beta, '|alpha| != |beta|')
    self.alpha = alpha
    self.beta = beta
    self.tol = tol
    self.radius = abs(alpha)
    self.theta = float(np.angle(alpha))
    self.phi = self.theta - float(np.mod(self.theta - np.angle(beta),
                                         2 * np.pi))

  @property
  def product(self):
    return self.alpha * self.beta

  @property
  def psi0(self):
    product = self.product
    if product.imag == 0:
      # -0.0 would select the lower root of a negative real
      product = complex(product.real, 0.)
    return complex(np.sqrt(product))

  @property
  def psi_prime0(self):
    """Closed form ``-(alpha + beta) / (2 Psi(0))``; its modulus is
    ``|cos((theta - phi) / 2)|``."""
    return -(self.alpha + self.beta) / (2 * self.psi0)

  @property
  def branch_points(self):
    return np.array([self.alpha, self.beta])

  def squared(self, w):
    """``(w - alpha)(w - beta)``, the square of every branch of Psi."""
    w = np.asarray(w, dtype=complex)
    return (w - self.alpha) * (w - self.beta)

  def branch_distance(self, w):
    w = np.asarray(w, dtype=complex)
    return np.minimum(np.abs(w - self.alpha), np.abs(w - self.beta))

  def check_clear(self, w, tol=None):
    """Raises PathHitsBranchPoint if any point of `w` is within `tol`
    (relative to ``1 + |w|``) of alpha or beta."""
    tol = self.tol if tol is None else tol
    w = np.asarray(w, dtype=complex)
    close = self.branch_distance(w) <= tol * (1 + np.abs(w))
    if np.any(close):
      point = complex(w.ravel()[np.argmax(close.ravel())])
      nearest = self.alpha if abs(point - self.alpha) <= \
          abs(point - self.beta) else self.beta
      raise PathHitsBranchPoint(point, nearest)

  def to_dict(self):
    return {'alpha': self.alpha, 'beta': self.beta, 'theta': self.theta,
            'phi': self.phi, 'radius': self.radius, 'psi0': self.psi0,
            'psi0_branch': 'principal'}

  def __repr__(self):
    return 'OmittedPair(alpha={}, beta={})'.format(format_complex(self.alpha),
                                                   format_complex(self.beta))


class BranchPath(object):
  """Ordered waypoints along which Psi is continued.

  Parameters
  ----------
  waypoints : array-like of complex
    The path, starting at its first element.

  step_bound : float or None
    Bound on the distance between consecutive waypoints. If None it is
    taken just above the largest gap.
  """

  def __init__(self, waypoints, step_bound=None):
    points = np.asarray(waypoints, dtype=complex).ravel()
    if points.size == 0:
      raise ValueError('A path needs at least one waypoint.')
    gaps = np.abs(np.diff(points))
    largest = gaps.max() if gaps.size else 0.
    if step_bound is None:
      step_bound = np.nextafter(largest, np.inf) if largest > 0 else np.inf
    elif not step_bound > 0:
      raise ValueError('step_bound must be positive, got {}.'
                       .format(step_bound))
    elif largest >= step_bound:
      raise ValueError('Consecutive waypoints {:.3g} apart exceed the step '
                       'bound {:.3g}.'.format(largest, step_bound))
    self.waypoints = points
    self.step_bound = float(step_bound)

  @classmethod
  def segment(cls, start, end, n_points=257):
    return cls(np.linspace(complex(start), complex(end), n_points))

  @classmethod
  def through(cls, vertices, n_per_segment=64):
    """Polyline visiting `vertices` in order."""
    vertices = np.asarray(vertices, dtype=complex).ravel()
    pieces = [np.linspace(a, b, n_per_segment, endpoint=False)
              for a, b in zip(vertices[:-1], vertices[1:])]
    return cls(np.concatenate(pieces + [vertices[-1:]]))

  @classmethod
  def radial_image(cls, f, z, n_points=256):
    """Image under `f` of the radial segment from 0 to `z`."""
    return cls(f(np.linspace(0., 1., n_points) * complex(z)))

  @property
  def start(self):
    return complex(self.waypoints[0])

  @property
  def end(self):
    return complex(self.waypoints[-1])

  def __len__(self):
    return len(self.waypoints)


def _nearer_root(root, previous, points):
  d_plus = np.abs(root - previous)
  d_minus = np.abs(root + previous)
  nearer = np.where(d_plus <= d_minus, root, -root)
  # candidates are 2|root| apart
  ambiguous = (np.minimum(d_plus, d_minus) >= np.abs(root)) & (root != 0)
  if np.any(ambiguous):
    raise AmbiguousContinuation(complex(points[np.argmax(ambiguous)]))
  return nearer


def continue_psi(pair, paths, start_values, step_fraction=STEP_FRACTION,
                 tol=None, max_subdivisions=MAX_SUBDIVISIONS):
  """Continues Psi along many paths at once.

  Every segment is subdivided so that its pieces are shorter than
  `step_fraction` times the distance from the segment to the branch points;
  at every intermediate point the square root nearer the previous value is
  taken.

  Parameters
  ----------
  pair : OmittedPair

  paths : array-like of complex, shape=(n_points,) or (n_paths, n_points)

  start_values : complex or array-like, shape=(n_paths,)
    Branch values of Psi at the first point of each path.

  Returns
  -------
  values : `numpy.ndarray`, same shape as `paths`
    The continued branch at every waypoint.
  """
  paths = np.asarray(paths, dtype=complex)
  flat = paths.ndim == 1
  paths = np.atleast_2d(paths)
  pair.check_clear(paths, tol)
  n_paths, n_points = paths.shape
  current = np.array(np.broadcast_to(np.asarray(start_values, dtype=complex),
                                     (n_paths,)))
  values = np.empty_like(paths)
  values[:, 0] = current
  if n_points > 1:
    distance = pair.branch_distance(paths)
    local = step_fraction * np.minimum(distance[:, :-1], distance[:, 1:])
    steps = np.abs(np.diff(paths, axis=1))
    counts = np.ceil(np.max(steps / local, axis=0))
    counts = np.clip(counts, 1, max_subdivisions).astype(int)
    for k in range(n_points - 1):
      a, b, m = paths[:, k], paths[:, k + 1], counts[k]
      for i in range(1, m):
        w = a + (b - a) * (i / m)
        current = _nearer_root(np.sqrt(pair.squared(w)), current, w)
      current = _nearer_root(np.sqrt(pair.squared(b)), current, b)
      values[:, k + 1] = current
  return values[0] if flat else values


def psi_eval(pair, target, path=None, step_fraction=STEP_FRACTION, tol=None):
  """Value at `target` of the branch of Psi continued from ``Psi(0)``.

  Parameters
  ----------
  pair : OmittedPair

  target : complex

  path : BranchPath, array-like or None
    Path from 0 to `target`. Defaults to the straight segment.

  Examples
  --------
  >>> abs(psi_eval(OmittedPair(2, -2), 2j) - 2 ** 1.5 * 1j) < 1e-12
  True
  """
  target = complex(target)
  if path is None:
    path = BranchPath.segment(0, target) if target != 0 else BranchPath([0])
  elif not isinstance(path, BranchPath):
    path = BranchPath(path)
  scale_tol = pair.tol if tol is None else tol
  if abs(path.start) > scale_tol:
    raise ValueError('The path must start at 0, starts at {!r}.'
                     .format(path.start))
  if abs(path.end - target) > scale_tol * (1 + abs(target)):
    raise ValueError('The path ends at {!r}, not at the target {!r}.'
                     .format(path.end, target))
  values = continue_psi(pair, path.waypoints, pair.psi0,
                        step_fraction=step_fraction, tol=tol)
  return complex(values[-1])


def psi_prime(pair, w, psi_w):
  """``Psi'(w) = (2w - alpha - beta) / (2 Psi(w))`` for branch-consistent
  values `psi_w`."""
  w = np.asarray(w, dtype=complex)
  psi_w = np.asarray(psi_w, dtype=complex)
  if np.any(psi_w == 0):
    raise DerivativeSingular('Psi vanishes: w is a branch point.')
  value = (2 * w - pair.alpha - pair.beta) / (2 * psi_w)
  return complex(value) if value.ndim == 0 else value


class MapSpec(object):
  """An evaluable normalized univalent map ``f(0) = 0, f'(0) = 1``.

  Use the class constructors (:meth:`identity`, :meth:`koebe`,
  :meth:`rotated_koebe`, :meth:`half_plane`, :meth:`polynomial`,
  :meth:`chain_limit`) or :meth:`from_name`. Instances are callable on
  arrays without a domain check; :func:`eval_map` adds the check.
  """
  KINDS = ('identity', 'koebe', 'rotated_koebe', 'half_plane', 'polynomial',
           'chain_limit')

  def __init__(self, kind, angle=0., coefficients=(), chain=None,
               horizon=20.):
    if kind not in self.KINDS:
      raise ValueError('Unknown map kind {!r}; expected one of {}.'
                       .format(kind, self.KINDS))
    if kind == 'chain_limit' and chain is None:
      raise ValueError('A chain limit needs a chain.')
    self.kind = kind
    self.angle = float(angle)
    self.coefficients = np.asarray(coefficients, dtype=complex).ravel()
    self.chain = chain
    self.horizon = float(horizon)

  @classmethod
  def identity(cls):
    return cls('identity')

  @classmethod
  def koebe(cls):
    return cls('koebe')

  @classmethod
  def rotated_koebe(cls, angle):
    return cls('rotated_koebe', angle=angle)

  @classmethod
  def half_plane(cls):
    return cls('half_plane')

  @classmethod
  def polynomial(cls, coefficients):
    """``z + a_2 z^2 + ... + a_n z^n`` from ``coefficients = (a_2, ...)``."""
    return cls('polynomial', coefficients=coefficients)

  @classmethod
  def chain_limit(cls, chain, horizon=20.):
    return cls('chain_limit', chain=chain, horizon=horizon)

  @classmethod
  def from_name(cls, name):
    """Parses ``identity``, ``koebe``, ``half-plane``,
    ``rotated-koebe:<angle>`` or ``polynomial:<a2>,<a3>,...``."""
    head, _, arg = str(name).strip().partition(':')
    head = head.lower().replace('-', '_')
    if head in ('identity', 'koebe', 'half_plane') and not arg:
      return cls(head)
    if head == 'rotated_koebe' and arg:
      return cls.rotated_koebe(float(arg))
    if head == 'polynomial' and arg:
      return cls.polynomial([parse_complex(a) for a in arg.split(',')])
    raise ValueError('Unknown map {!r}; expected identity, koebe, half-plane, '
                     'rotated-koebe:<angle> or polynomial:<a2>,...'
                     .format(name))

  @property
  def full_coefficients(self):
    """Ascending coefficients ``(0, 1, a_2, ...)`` of a polynomial map."""
    return np.concatenate([[0, 1], self.coefficients])

  @property
  def tip_preimage(self):
    """Point z0 of the unit circle where ``f'`` vanishes, for the Koebe
    kinds; None otherwise."""
    if self.kind == 'koebe':
      return -1 + 0j
    if self.kind == 'rotated_koebe':
      return -np.exp(-1j * self.angle)
    return None

  def __call__(self, z):
    z = np.asarray(z, dtype=complex)
    if self.kind == 'identity':
      return z.copy()
    if self.kind == 'koebe':
      return z / (1 - z) ** 2
    if self.kind == 'rotated_koebe':
      u = np.exp(1j * self.angle)
      return (u * z) / (1 - u * z) ** 2 / u
    if self.kind == 'half_plane':
      return z / (1 - z)
    if self.kind == 'polynomial':
      return P.polyval(z, self.full_coefficients)
    return self.chain.limit(z, self.horizon)

  def derivative(self, z):
    z = np.asarray(z, dtype=complex)
    if self.kind == 'identity':
      return np.ones_like(z)
    if self.kind == 'koebe':
      return (1 + z) / (1 - z) ** 3
    if self.kind == 'rotated_koebe':
      u = np.exp(1j * self.angle) * z
      return (1 + u) / (1 - u) ** 3
    if self.kind == 'half_plane':
      return 1 / (1 - z) ** 2
    if self.kind == 'polynomial':
      return P.polyval(z, P.polyder(self.full_coefficients))
    return (self(z + FD_STEP) - self(z - FD_STEP)) / (2 * FD_STEP)

  def to_dict(self):
    out = {'kind': self.kind}
    if self.kind == 'rotated_koebe':
      out['angle'] = self.angle
    if self.kind == 'polynomial':
      out['coefficients'] = self.coefficients
    if self.kind == 'chain_limit':
      out['horizon'] = self.horizon
      out['chain'] = self.chain.get_params(deep=False)['driving']
    return out

  def __repr__(self):
    return 'MapSpec({})'.format(', '.join(
        '{}={!r}'.format(k, v) for k, v in self.to_dict().items()))


def eval_map(f, z):
  """Evaluates `f` at points of the open unit disk.

  Raises
  ------
  OutsideDomain
    If some ``|z| >= 1``.

  Examples
  --------
  >>> eval_map(MapSpec.koebe(), 0.5)
  (2+0j)
  """
  points, scalar = check_points(z)
  return unwrap_scalar(np.asarray(f(points), dtype=complex), scalar)


def _check_radius(radius):
  check_scalar(radius, 'radius', numbers.Real, min_val=0, max_val=1,
               include_boundaries='neither')
  return float(radius)


def coefficients(f, n_max, radius=DEFAULT_RADIUS, samples=DEFAULT_SAMPLES):
  """Taylor coefficients ``a_0 .. a_{n_max}`` of `f` by the trapezoid rule
  on the circle ``|z| = radius``, all from one FFT."""
  radius = _check_radius(radius)
  samples = check_power_of_two(samples, 'samples')
  check_scalar(n_max, 'n_max', numbers.Integral, min_val=0,
               max_val=samples - 1)
  _, nodes = circle_nodes(samples, radius)
  values = np.asarray(f(nodes), dtype=complex)
  c = np.fft.fft(values)[:n_max + 1] / samples
  return c / radius ** np.arange(n_max + 1)


def coefficient(f, j, radius=DEFAULT_RADIUS, samples=DEFAULT_SAMPLES):
  """Taylor coefficient of index `j` of `f`.

  Examples
  --------
  >>> abs(coefficient(MapSpec.koebe(), 2) - 2) < 1e-12
  True
  """
  return complex(coefficients(f, j, radius, samples)[j])


class LinearFunctional(object):
  """A continuous linear functional on analytic functions of the disk.

  Three kinds are supported: a single Taylor coefficient, a finite
  combination of coefficients, and a (weighted) point evaluation.

  Examples
  --------
  >>> L = LinearFunctional.from_string('a2')
  >>> abs(L(MapSpec.koebe()) - 2) < 1e-12
  True
  """
  _TERM = re.compile(r'\s*([+-]?)\s*(\([^)]*\)|[0-9.eE]*[ij]?)\s*\*?\s*'
                     r'a(\d+)\s*')

  def __init__(self, kind, terms=(), point=0j, weight=1.):
    if kind not in ('coefficient', 'combination', 'point'):
      raise ValueError('Unknown functional kind {!r}.'.format(kind))
    terms = tuple((int(j), complex(w)) for j, w in terms)
    if kind != 'point':
      if not terms:
        raise ValueError('A coefficient functional needs at least one term.')
      if any(j < 0 for j, _ in terms):
        raise ValueError('Coefficient indices must be nonnegative.')
    elif abs(complex(point)) >= 1:
      raise OutsideDomain(abs(complex(point)))
    self.kind = kind
    self.terms = terms
    self.point = complex(point)
    self.weight = complex(weight)

  @classmethod
  def coefficient_index(cls, j):
    check_scalar(j, 'j', numbers.Integral, min_val=0)
    return cls('coefficient', terms=((j, 1.),))

  @classmethod
  def combination(cls, terms):
    return cls('combination', terms=terms)

  @classmethod
  def point_evaluation(cls, point, weight=1.):
    return cls('point', point=point, weight=weight)

  @classmethod
  def from_string(cls, text):
    """Parses ``a2``, ``0.5a2+(1+1i)a3`` or ``point:<z>``."""
    text = str(text).strip()
    if text.lower().startswith('point:'):
      return cls.point_evaluation(parse_complex(text[6:]))
    terms, position = [], 0
    for match in cls._TERM.finditer(text):
      if match.start() != position:
        break
      sign, weight, index = match.groups()
      weight = weight.strip('()') or '1'
      weight = parse_complex(weight) * (-1 if sign == '-' else 1)
      terms.append((int(index), weight))
      position = match.end()
    if not terms or position != len(text):
      raise ValueError('Malformed functional {!r}; expected e.g. a2, '
                       '0.5a2+(1+1i)a3 or point:0.1+0.2i.'.format(text))
    if len(terms) == 1 and terms[0][1] == 1:
      return cls.coefficient_index(terms[0][0])
    return cls.combination(terms)

  @property
  def max_index(self):
    return max(j for j, _ in self.terms) if self.terms else 0

  def sample_points(self, radius=DEFAULT_RADIUS, samples=DEFAULT_SAMPLES):
    """Points at which a function must be known to apply the functional."""
    if self.kind == 'point':
      return np.array([self.point])
    radius = _check_radius(radius)
    samples = check_power_of_two(samples, 'samples')
    if self.max_index >= samples:
      raise ValueError('Index {} needs more than {} samples.'
                       .format(self.max_index, samples))
    return circle_nodes(samples, radius)[1]

  def from_samples(self, values, radius=DEFAULT_RADIUS,
                   samples=DEFAULT_SAMPLES):
    """Applies the functional to a function known by its values at
    :meth:`sample_points`."""
    values = np.asarray(values, dtype=complex)
    if self.kind == 'point':
      return complex(self.weight * values[0])
    c = np.fft.fft(values) / len(values)
    return complex(sum(w * c[j] / radius ** j for j, w in self.terms))

  def on_coefficients(self, a):
    """Exact value on a polynomial given by ascending coefficients `a`."""
    a = np.asarray(a, dtype=complex)
    if self.kind == 'point':
      return complex(self.weight * P.polyval(self.point, a))
    return complex(sum(w * a[j] for j, w in self.terms if j < len(a)))

  def __call__(self, f, radius=DEFAULT_RADIUS, samples=DEFAULT_SAMPLES):
    return apply_functional(self, f, radius, samples)

  def __mul__(self, scalar):
    scalar = complex(scalar)
    if self.kind == 'point':
      return LinearFunctional('point', point=self.point,
                              weight=scalar * self.weight)
    terms = tuple((j, scalar * w) for j, w in self.terms)
    if self.kind == 'coefficient' and scalar == 1:
      return LinearFunctional('coefficient', terms=terms)
    return LinearFunctional('combination', terms=terms)

  __rmul__ = __mul__

  def __str__(self):
    if self.kind == 'point':
      return 'point:{}'.format(format_complex(self.point))
    if self.kind == 'coefficient':
      return 'a{}'.format(self.terms[0][0])
    return '+'.join('({})a{}'.format(format_complex(w), j)
                    for j, w in self.terms)

  def __repr__(self):
    return 'LinearFunctional({!r})'.format(str(self))

  def to_dict(self):
    out = {'kind': self.kind, 'text': str(self)}
    if self.kind == 'point':
      out.update(point=self.point, weight=self.weight)
    else:
      out['terms'] = [[j, w] for j, w in self.terms]
    return out


def apply_functional(L, f, radius=DEFAULT_RADIUS, samples=DEFAULT_SAMPLES):
  """``L(f)``, through coefficient extraction for the coefficient kinds."""
  points = L.sample_points(radius, samples)
  return L.from_samples(f(points), radius, samples)


def _derivative(f, z, derivative=None):
  if derivative is not None:
    return np.asarray(derivative(z), dtype=complex)
  if hasattr(f, 'derivative'):
    return np.asarray(f.derivative(z), dtype=complex)
  return (np.asarray(f(z + FD_STEP)) - np.asarray(f(z - FD_STEP))) / \
      (2 * FD_STEP)


def _quotient_moduli(points, values, derivative):
  dz = points[:, None] - points[None, :]
  dv = values[:, None] - values[None, :]
  np.fill_diagonal(dz, 1.)
  np.fill_diagonal(dv, derivative)
  return np.abs(dv / dz)


def perturbation_radius(f, g, gridsize=64, f_prime=None, g_prime=None,
                        tol=1e-6, cap=np.inf):
  """Sampled lower bound on the radius of injectivity of ``f + w0 g``.

  Computes ``delta = eps / M`` where `eps` is the smallest modulus of the
  difference quotients of `f` (its derivative on the diagonal) and `M` the
  largest one of `g`, over all pairs of a polar grid of the closed disk
  (`gridsize` angles times ``gridsize // 8`` radii, the outermost being 1).

  Parameters
  ----------
  f, g : callable
    Vectorized maps analytic on a neighborhood of the closed disk.

  gridsize : int, optional (default=64)
    Number of angles of the grid.

  f_prime, g_prime : callable or None
    Derivatives. If None, ``.derivative`` of a :class:`MapSpec` is used,
    else a central difference.

  tol : float, optional (default=1e-6)
    Smallest admissible ``|f'|`` on the unit circle.

  cap : float, optional (default=inf)
    Value returned when `g` is constant on the grid.

  Raises
  ------
  DerivativeVanishesOnBoundary
    If ``min |f'|`` on the unit circle is below `tol`.
  """
  check_scalar(gridsize, 'gridsize', numbers.Integral, min_val=8)
  n_radii = gridsize // 8
  radii = np.arange(1, n_radii + 1) / n_radii
  theta = 2 * np.pi * np.arange(gridsize) / gridsize
  points = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()

  fp = _derivative(f, points, f_prime)
  boundary = np.abs(fp[-gridsize:])
  k = np.argmin(boundary)
  if boundary[k] < tol:
    raise DerivativeVanishesOnBoundary(boundary[k], points[-gridsize + k])
  gp = np.broadcast_to(_derivative(g, points, g_prime), points.shape)
  eps = _quotient_moduli(points, np.asarray(f(points), dtype=complex),
                         fp).min()
  gv = np.broadcast_to(np.asarray(g(points), dtype=complex), points.shape)
  M = _quotient_moduli(points, gv, gp).max()
  if M == 0:
    return cap
  return min(eps / M, cap)

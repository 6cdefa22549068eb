"""
Extremal problems over the univalent polynomials of degree at most n:
a sampled univalence certificate, boundary behaviour of the derivative and
a multi-start search maximizing a linear functional.
"""
import numbers
import warnings
from collections import namedtuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize, minimize_scalar
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils import check_random_state, check_scalar

from ._util import circle_nodes, format_complex
from .analytic import MapSpec
from .exceptions import (ConstantFunctional, DegenerateCurve,
                         InconclusiveOnBoundary, NoFeasibleStart, NotAZero)

ZERO_TOL = 1e-4
SIMPLICITY_TOL = 1e-3
WINDING_ZERO_TOL = 1e-10
SEPARATION_TOL = 1e-10
SHRUNKEN_RADIUS = 1 - 1e-6
COINCIDENCE_TOL = 1e-14

BoundaryMinimum = namedtuple('BoundaryMinimum', ['value', 'angle'])
IntersectionWitness = namedtuple('IntersectionWitness', ['first', 'second'])


class PolynomialCandidate(object):
  """``p(z) = z + a_2 z**2 + ... + a_n z**n``.

  Parameters
  ----------
  coefficients : array-like of complex
    ``(a_2, ..., a_m)`` with ``m <= degree_cap``.

  degree_cap : int or None
    n; defaults to the stored degree.
  """

  def __init__(self, coefficients=(), degree_cap=None):
    coefficients = np.asarray(coefficients, dtype=complex).ravel()
    if degree_cap is None:
      degree_cap = len(coefficients) + 1
    check_scalar(degree_cap, 'degree_cap', numbers.Integral, min_val=1)
    if len(coefficients) + 1 > degree_cap:
      raise ValueError('{} coefficients exceed the degree cap {}.'
                       .format(len(coefficients), degree_cap))
    self.coefficients = coefficients
    self.degree_cap = int(degree_cap)

  @classmethod
  def from_vector(cls, x, n):
    """From ``(Re a_2, Im a_2, Re a_3, ...)``."""
    x = np.asarray(x, dtype=float)
    return cls(x[0::2] + 1j * x[1::2], n)

  def to_vector(self):
    out = np.empty(2 * len(self.coefficients))
    out[0::2] = self.coefficients.real
    out[1::2] = self.coefficients.imag
    return out

  @property
  def full_coefficients(self):
    return np.concatenate([[0, 1], self.coefficients])

  def __call__(self, z):
    return P.polyval(np.asarray(z, dtype=complex), self.full_coefficients)

  def derivative(self, z, order=1):
    return P.polyval(np.asarray(z, dtype=complex),
                     P.polyder(self.full_coefficients, order))

  def derivative_roots(self):
    return P.polyroots(P.polyder(self.full_coefficients))

  def as_map(self):
    return MapSpec.polynomial(self.coefficients)

  def to_dict(self):
    return {'degree_cap': self.degree_cap,
            'coefficients': self.full_coefficients}

  def __repr__(self):
    terms = ' + '.join('({})z^{}'.format(format_complex(a), k)
                       for k, a in enumerate(self.coefficients, 2))
    return 'PolynomialCandidate(z{})'.format(' + ' + terms if terms else '')


def _as_candidate(p):
  if isinstance(p, PolynomialCandidate):
    return p
  return PolynomialCandidate(p)


def _as_points(points):
  points = np.asarray(points)
  if np.iscomplexobj(points) or points.ndim == 1:
    points = np.asarray(points, dtype=complex).ravel()
    return np.stack([points.real, points.imag], axis=1)
  return np.asarray(points, dtype=float)


def _orientation(p, q, r):
  val = (q[1] - p[1]) * (r[0] - q[0]) - (q[0] - p[0]) * (r[1] - q[1])
  return int(np.sign(val))


def _on_segment(p, q, r):
  """True if q, collinear with p and r, lies on the segment pr."""
  return (min(p[0], r[0]) <= q[0] <= max(p[0], r[0]) and
          min(p[1], r[1]) <= q[1] <= max(p[1], r[1]))


def segments_intersect(p1, q1, p2, q2):
  """Whether the closed segments p1q1 and p2q2 share a point."""
  o1 = _orientation(p1, q1, p2)
  o2 = _orientation(p1, q1, q2)
  o3 = _orientation(p2, q2, p1)
  o4 = _orientation(p2, q2, q1)
  if o1 != o2 and o3 != o4:
    return True
  return ((o1 == 0 and _on_segment(p1, p2, q1)) or
          (o2 == 0 and _on_segment(p1, q2, q1)) or
          (o3 == 0 and _on_segment(p2, p1, q2)) or
          (o4 == 0 and _on_segment(p2, q1, q2)))


def _adjacent(i, j, n):
  return abs(i - j) == 1 or abs(i - j) == n - 1


class _ActiveSegments(object):
  """Segments crossing the sweep line, ordered by height at the sweep."""

  def __init__(self, left, right):
    self._left = left
    self._right = right
    self._active = []

  def _y_at(self, indices, x):
    indices = np.asarray(indices, dtype=int)
    x1, y1 = self._left[indices, 0], self._left[indices, 1]
    x2, y2 = self._right[indices, 0], self._right[indices, 1]
    dx = x2 - x1
    safe = np.where(dx == 0, 1., dx)
    return np.where(dx == 0, np.minimum(y1, y2),
                    y1 + (y2 - y1) * (x - x1) / safe)

  def _slope(self, indices):
    indices = np.asarray(indices, dtype=int)
    dx = self._right[indices, 0] - self._left[indices, 0]
    dy = self._right[indices, 1] - self._left[indices, 1]
    safe = np.where(dx == 0, 1., dx)
    return np.where(dx == 0, np.inf, dy / safe)

  def insert(self, idx, x):
    if self._active:
      keys = self._y_at(self._active, x)
      slopes = self._slope(self._active)
      key = self._y_at([idx], x)[0]
      slope = self._slope([idx])[0]
      # ties at a shared endpoint are ordered by slope
      pos = int(np.sum((keys < key) | ((keys == key) & (slopes < slope))))
    else:
      pos = 0
    self._active.insert(pos, idx)
    return pos

  def remove(self, idx):
    pos = self._active.index(idx)
    self._active.pop(pos)
    return pos

  def neighbor(self, pos):
    if 0 <= pos < len(self._active):
      return self._active[pos]
    return None


def boundary_self_intersection(points):
  """First pair of non-adjacent intersecting edges of a closed polyline.

  Shamos-Hoey sweep over the segment endpoints: a segment is compared with
  its neighbours in the active set when it enters, and the two segments
  that become neighbours when one leaves are compared.

  Parameters
  ----------
  points : array-like of complex, shape=(n_points,), or of shape
    (n_points, 2)
    Vertices; the edge from the last vertex back to the first closes the
    curve.

  Returns
  -------
  witness : IntersectionWitness or None
    Edge indices ``(i, j)``, edge i joining vertices i and i + 1.

  Examples
  --------
  >>> square = np.exp(2j * np.pi * np.arange(8) / 8)
  >>> boundary_self_intersection(square) is None
  True
  """
  pts = _as_points(points)
  n = len(pts)
  if n < 8:
    raise ValueError('Need at least 8 points, got {}.'.format(n))
  a, b = pts, np.roll(pts, -1, axis=0)
  swap = (a[:, 0] > b[:, 0]) | ((a[:, 0] == b[:, 0]) & (a[:, 1] > b[:, 1]))
  left = np.where(swap[:, None], b, a)
  right = np.where(swap[:, None], a, b)
  events = sorted([(left[i, 0], 0, left[i, 1], i) for i in range(n)] +
                  [(right[i, 0], 1, right[i, 1], i) for i in range(n)])
  active = _ActiveSegments(left, right)

  def check(i, j):
    if i is None or j is None or _adjacent(i, j, n):
      return None
    if segments_intersect(left[i], right[i], left[j], right[j]):
      return IntersectionWitness(min(i, j), max(i, j))
    return None

  for x, kind, _, idx in events:
    if kind == 0:
      pos = active.insert(idx, x)
      for other in (active.neighbor(pos - 1), active.neighbor(pos + 1)):
        witness = check(idx, other)
        if witness is not None:
          return witness
    else:
      pos = active.remove(idx)
      witness = check(active.neighbor(pos - 1), active.neighbor(pos))
      if witness is not None:
        return witness
  return None


def brute_force_self_intersection(points):
  """Quadratic re-check of :func:`boundary_self_intersection`; returns the
  lexicographically first intersecting pair of non-adjacent edges."""
  pts = _as_points(points)
  n = len(pts)
  a, b = pts, np.roll(pts, -1, axis=0)

  def orient(p, q, r):
    return np.sign((q[..., 1] - p[..., 1]) * (r[..., 0] - q[..., 0]) -
                   (q[..., 0] - p[..., 0]) * (r[..., 1] - q[..., 1]))

  A, B = a[:, None, :], b[:, None, :]
  C, D = a[None, :, :], b[None, :, :]
  crossing = (orient(A, B, C) != orient(A, B, D)) & \
      (orient(C, D, A) != orient(C, D, B))
  i, j = np.nonzero(np.triu(crossing, 2))
  for ii, jj in zip(i, j):
    if not _adjacent(ii, jj, n):
      return IntersectionWitness(int(ii), int(jj))
  return None


def _segments_intersect_many(p1, q1, p2, q2):
  """Row-wise :func:`segments_intersect` over arrays of shape (k, 2)."""
  def orient(p, q, r):
    return np.sign((q[:, 1] - p[:, 1]) * (r[:, 0] - q[:, 0]) -
                   (q[:, 0] - p[:, 0]) * (r[:, 1] - q[:, 1]))

  def on_segment(p, q, r):
    return ((np.minimum(p[:, 0], r[:, 0]) <= q[:, 0]) &
            (q[:, 0] <= np.maximum(p[:, 0], r[:, 0])) &
            (np.minimum(p[:, 1], r[:, 1]) <= q[:, 1]) &
            (q[:, 1] <= np.maximum(p[:, 1], r[:, 1])))

  o1, o2 = orient(p1, q1, p2), orient(p1, q1, q2)
  o3, o4 = orient(p2, q2, p1), orient(p2, q2, q1)
  return (((o1 != o2) & (o3 != o4)) |
          ((o1 == 0) & on_segment(p1, p2, q1)) |
          ((o2 == 0) & on_segment(p1, q2, q1)) |
          ((o3 == 0) & on_segment(p2, p1, q2)) |
          ((o4 == 0) & on_segment(p2, q1, q2)))


def neighbor_self_intersection(points):
  """Lexicographically first pair of non-adjacent intersecting edges of a
  closed polyline, or None.

  Two edges can only meet if their midpoints are at most one longest edge
  apart, so only the pairs a k-d tree returns within that distance are
  tested, all at once. Answers the same question as
  :func:`boundary_self_intersection`, with the predicates of
  :func:`segments_intersect`.
  """
  pts = _as_points(points)
  n = len(pts)
  if n < 8:
    raise ValueError('Need at least 8 points, got {}.'.format(n))
  a, b = pts, np.roll(pts, -1, axis=0)
  reach = np.hypot(b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]).max()
  tree = cKDTree((a + b) / 2)
  pairs = np.array(sorted(tree.query_pairs(reach * (1 + 1e-9))),
                   dtype=int).reshape(-1, 2)
  i, j = pairs[:, 0], pairs[:, 1]
  keep = (j - i != 1) & (j - i != n - 1)
  i, j = i[keep], j[keep]
  hit = _segments_intersect_many(a[i], b[i], a[j], b[j])
  if not np.any(hit):
    return None
  k = int(np.argmax(hit))
  return IntersectionWitness(int(i[k]), int(j[k]))


def derivative_winding(p, M, radius=1., zero_tol=WINDING_ZERO_TOL,
                       max_depth=50):
  """Number of zeros of ``p'`` in the disk ``|z| < radius``.

  The argument change of ``p'`` along the circle is summed over the `M`
  equispaced arcs; an arc whose change exceeds ``pi / 2`` in modulus is
  bisected until it does not, so zeros close to the circle are counted
  correctly.

  Raises
  ------
  InconclusiveOnBoundary
    If ``|p'|`` at a sample is below `zero_tol`.

  Examples
  --------
  >>> derivative_winding(PolynomialCandidate([0.51]), 1024)
  1
  """
  p = _as_candidate(p)
  check_scalar(M, 'M', numbers.Integral, min_val=8)
  theta, z = circle_nodes(M, radius)
  values = p.derivative(z)
  modulus = np.abs(values)
  k = np.argmin(modulus)
  if modulus[k] < zero_tol:
    raise InconclusiveOnBoundary(modulus[k], theta[k])
  theta = np.append(theta, 2 * np.pi)
  values = np.append(values, values[:1])
  change = np.angle(values[1:] / values[:-1])

  def refine(t0, t1, v0, v1, depth):
    step = np.angle(v1 / v0)
    if abs(step) <= np.pi / 2:
      return step
    if depth >= max_depth:
      raise InconclusiveOnBoundary(min(abs(v0), abs(v1)), t0)
    tm = (t0 + t1) / 2
    vm = complex(p.derivative(radius * np.exp(1j * tm)))
    if abs(vm) < zero_tol:
      raise InconclusiveOnBoundary(abs(vm), tm)
    return refine(t0, tm, v0, vm, depth + 1) + refine(tm, t1, vm, v1,
                                                      depth + 1)

  for i in np.nonzero(np.abs(change) > np.pi / 2)[0]:
    change[i] = refine(theta[i], theta[i + 1], values[i], values[i + 1], 0)
  return int(np.rint(change.sum() / (2 * np.pi)))


def _is_starlike(w):
  """The polyline winds once around 0 with increasing argument, so every
  ray from 0 meets it once and it is simple."""
  if np.any(w == 0):
    return False
  change = np.angle(np.roll(w, -1) / w)
  return bool(np.all(change > 0) and abs(change.sum() - 2 * np.pi) < 1e-6)


def min_boundary_separation(z, w, k=8):
  """Smallest ``|w_i - w_j| / |z_i - z_j|`` over consecutive samples and
  over the `k` nearest image neighbours of every sample."""
  consecutive = np.abs(np.roll(w, -1) - w) / np.abs(np.roll(z, -1) - z)
  k = min(k, len(w) - 1)
  tree = cKDTree(np.stack([w.real, w.imag], axis=1))
  _, neighbors = tree.query(np.stack([w.real, w.imag], axis=1), k=k + 1)
  i = np.repeat(np.arange(len(w)), k)
  j = neighbors[:, 1:].ravel()
  distinct = i != j
  i, j = i[distinct], j[distinct]
  near = np.abs(w[i] - w[j]) / np.abs(z[i] - z[j])
  return float(min(consecutive.min(), near.min() if near.size else np.inf))


def _winding_with_fallback(p, M):
  """(winding, radius used), winding None when both radii are
  inconclusive."""
  for radius in (1., SHRUNKEN_RADIUS):
    try:
      return derivative_winding(p, M, radius), radius
    except InconclusiveOnBoundary:
      continue
  return None, None


class UnivalenceCertificate(object):
  """Sampled evidence that a polynomial is univalent on the closed disk.

  Attributes
  ----------
  boundary_samples : int
    M, the resolution of the certificate.

  min_boundary_separation : float

  derivative_winding : int or None
    Zeros of ``p'`` inside the circle of radius `winding_radius`; None if
    undetermined.

  winding_radius : float or None
    1, or ``1 - 1e-6`` when a zero of ``p'`` sits on the unit circle.

  verdict : {'certified', 'rejected', 'inconclusive'}

  witness : dict or None
    The violation backing a rejection.
  """

  def __init__(self, boundary_samples, min_boundary_separation,
               derivative_winding, winding_radius, verdict, witness=None):
    self.boundary_samples = boundary_samples
    self.min_boundary_separation = min_boundary_separation
    self.derivative_winding = derivative_winding
    self.winding_radius = winding_radius
    self.verdict = verdict
    self.witness = witness

  @property
  def resolution(self):
    return 2 * np.pi / self.boundary_samples

  @property
  def certified(self):
    return self.verdict == 'certified'

  def to_dict(self):
    return {'boundary_samples': self.boundary_samples,
            'resolution': self.resolution,
            'min_boundary_separation': self.min_boundary_separation,
            'derivative_winding': self.derivative_winding,
            'winding_radius': self.winding_radius,
            'verdict': self.verdict, 'witness': self.witness}

  def __repr__(self):
    return 'UnivalenceCertificate(verdict={!r}, M={})'.format(
        self.verdict, self.boundary_samples)


def _boundary_samples(p, M):
  _, z = circle_nodes(M)
  w = p(z)
  gap = np.abs(np.roll(w, -1) - w)
  k = np.argmin(gap)
  if gap[k] < COINCIDENCE_TOL:
    raise DegenerateCurve('Samples {} and {} of the boundary coincide.'
                          .format(k, (k + 1) % M))
  return z, w


def _boundary_is_simple(w):
  if _is_starlike(w):
    return True, None
  witness = boundary_self_intersection(w)
  return witness is None, witness


def is_univalent(p, M=4096, separation_tol=SEPARATION_TOL):
  """Certifies, at resolution `M`, that `p` is univalent on the closed
  disk.

  The boundary curve must be simple (sweep-line check, skipped when the
  curve is starlike about 0) and ``p'`` must have no zero in the disk
  (winding number 0, measured on the circle of radius ``1 - 1e-6`` when a
  zero of ``p'`` lies on the unit circle).

  Parameters
  ----------
  p : PolynomialCandidate or array-like of ``(a_2, ..., a_n)``

  M : int, optional (default=4096)
    Even number of boundary samples, at least 512.

  Returns
  -------
  certificate : UnivalenceCertificate

  Raises
  ------
  DegenerateCurve
    If two consecutive boundary samples coincide.

  Examples
  --------
  >>> is_univalent(PolynomialCandidate([0.49])).verdict
  'certified'
  >>> is_univalent(PolynomialCandidate([0.51])).verdict
  'rejected'
  """
  p = _as_candidate(p)
  check_scalar(M, 'M', numbers.Integral, min_val=512)
  if M % 2:
    raise ValueError('M must be even, got {}.'.format(M))
  z, w = _boundary_samples(p, M)
  separation = min_boundary_separation(z, w)
  winding, radius = _winding_with_fallback(p, M)
  if winding is not None and winding > 0:
    return UnivalenceCertificate(M, separation, winding, radius, 'rejected',
                                 {'kind': 'winding', 'zeros_inside': winding,
                                  'radius': radius})
  simple, witness = _boundary_is_simple(w)
  if not simple:
    return UnivalenceCertificate(M, separation, winding, radius, 'rejected',
                                 {'kind': 'intersection',
                                  'edges': list(witness)})
  verdict = 'certified' if winding == 0 and separation > separation_tol \
      else 'inconclusive'
  return UnivalenceCertificate(M, separation, winding, radius, verdict)


def _is_feasible(p, M):
  """Verdict of :func:`is_univalent` without the separation statistic, the
  intersection test done by :func:`neighbor_self_intersection`."""
  try:
    _, w = _boundary_samples(p, M)
  except DegenerateCurve:
    return False
  winding, _ = _winding_with_fallback(p, M)
  if winding != 0:
    return False
  return _is_starlike(w) or neighbor_self_intersection(w) is None


def _scaled(p, s):
  return PolynomialCandidate(s * p.coefficients, p.degree_cap)


def retract_to_certified(p, M=4096, n_bisections=50):
  """Moves `p` along the ray ``z + s (a_2 z**2 + ...)`` towards the identity
  until it is certified univalent at resolution `M`.

  The largest feasible ``s`` in ``[0, 1]`` is located by bisection and the
  candidate there is certified; if that certificate is not granted, ``s``
  is shrunk by relative steps of 1e-9, 1e-6 and 1e-3.

  Returns
  -------
  p : PolynomialCandidate
    `p` itself when it is already certified.

  certificate : UnivalenceCertificate
    Certificate of the returned polynomial.

  Examples
  --------
  >>> q, certificate = retract_to_certified(PolynomialCandidate([0.51]))
  >>> certificate.certified and abs(q.coefficients[0]) < 0.5 + 1e-9
  True
  """
  p = _as_candidate(p)
  certificate = is_univalent(p, M)
  if certificate.certified:
    return p, certificate
  lo, hi = 0., 1.
  for _ in range(n_bisections):
    mid = (lo + hi) / 2
    if _is_feasible(_scaled(p, mid), M):
      lo = mid
    else:
      hi = mid
  for shrink in (1., 1 - 1e-9, 1 - 1e-6, 1 - 1e-3):
    q = _scaled(p, lo * shrink)
    certificate = is_univalent(q, M)
    if certificate.certified:
      break
  return q, certificate


def _refine_minimum(fun, theta, k, M):
  """Golden-section refinement of the grid minimum at index k."""
  h = 2 * np.pi / M
  grid = (theta[k] - h, theta[k], theta[k] + h)
  try:
    res = minimize_scalar(fun, bracket=grid, method='golden',
                          options={'xtol': 1e-12})
  except ValueError:
    res = minimize_scalar(fun, bounds=(grid[0], grid[2]), method='bounded',
                          options={'xatol': 1e-12})
  if res.fun < fun(theta[k]):
    return float(res.fun), float(np.mod(res.x, 2 * np.pi))
  return float(fun(theta[k])), float(theta[k])


def _boundary_modulus(p):
  return lambda t: float(np.abs(p.derivative(np.exp(1j * t))))


def boundary_derivative_min(p, M=1024):
  """``min |p'(e^{i theta})|`` and its angle, from the `M`-grid refined by
  golden-section search.

  Examples
  --------
  >>> value, angle = boundary_derivative_min(PolynomialCandidate([0.5]))
  >>> value < 1e-6 and abs(angle - np.pi) < 1e-6
  True
  """
  p = _as_candidate(p)
  check_scalar(M, 'M', numbers.Integral, min_val=8)
  theta, z = circle_nodes(M)
  k = int(np.argmin(np.abs(p.derivative(z))))
  return BoundaryMinimum(*_refine_minimum(_boundary_modulus(p), theta, k, M))


def boundary_zero_angles(p, M=1024, zero_tol=ZERO_TOL):
  """Every angle where ``|p'(e^{i theta})|`` has a local minimum below
  `zero_tol`, as a list of :class:`BoundaryMinimum`."""
  p = _as_candidate(p)
  theta, z = circle_nodes(M)
  modulus = np.abs(p.derivative(z))
  local = (modulus <= np.roll(modulus, 1)) & (modulus <= np.roll(modulus, -1))
  fun = _boundary_modulus(p)
  zeros = []
  for k in np.nonzero(local)[0]:
    value, angle = _refine_minimum(fun, theta, k, M)
    if value >= zero_tol:
      continue
    gap = [abs(np.angle(np.exp(1j * (angle - other.angle))))
           for other in zeros]
    if all(g > 2 * np.pi / M for g in gap):
      zeros.append(BoundaryMinimum(value, angle))
  return zeros


def boundary_derivative_trace(p, M=1024):
  """Rows ``(theta, |p'(e^{i theta})|)`` over the `M`-grid."""
  p = _as_candidate(p)
  theta, z = circle_nodes(M)
  return [{'theta': t, 'abs_derivative': v}
          for t, v in zip(theta, np.abs(p.derivative(z)))]


def zero_simplicity_check(p, angle, zero_tol=ZERO_TOL):
  """``|p''(e^{i angle})|`` at a boundary zero of ``p'``.

  Raises
  ------
  NotAZero
    If ``|p'(e^{i angle})|`` is not below `zero_tol`.
  """
  p = _as_candidate(p)
  z = np.exp(1j * angle)
  value = abs(complex(p.derivative(z)))
  if value >= zero_tol:
    raise NotAZero(value, angle, zero_tol)
  return abs(complex(p.derivative(z, order=2)))


class ExtremalResult(object):
  """Best polynomial found by :class:`ExtremalSearch`.

  Attributes
  ----------
  polynomial : PolynomialCandidate

  functional_value : complex
    ``L(p)``.

  objective : float
    ``|L(p)|`` or ``Re L(p)``.

  phase : float
    ``arg L(p)``; ``exp(-i phase) L`` has real maximum at p.

  boundary_derivative_min : float

  boundary_derivative_angle : float

  zero_angles : list of float

  second_derivative_at_zeros : list of float
    ``|p''|`` at the zeros, from :func:`zero_simplicity_check`.

  certificate : UnivalenceCertificate

  alternatives : list of PolynomialCandidate
    Other distinct local maxima within 0.1% of the best objective.

  converged : bool
  """

  def __init__(self, polynomial, functional_value, objective, phase,
               boundary_minimum, zero_angles, second_derivative_at_zeros,
               certificate, alternatives, converged, functional,
               n_feasible_starts):
    self.polynomial = polynomial
    self.functional_value = functional_value
    self.objective = objective
    self.phase = phase
    self.boundary_derivative_min = boundary_minimum.value
    self.boundary_derivative_angle = boundary_minimum.angle
    self.zero_angles = zero_angles
    self.second_derivative_at_zeros = second_derivative_at_zeros
    self.certificate = certificate
    self.alternatives = alternatives
    self.converged = converged
    self.functional = functional
    self.n_feasible_starts = n_feasible_starts

  def simple_zeros(self, tol=SIMPLICITY_TOL):
    return all(abs(d) > tol for d in self.second_derivative_at_zeros)

  def trace(self, M=1024):
    return boundary_derivative_trace(self.polynomial, M)

  def to_dict(self):
    return {'functional': self.functional,
            'polynomial': self.polynomial.to_dict(),
            'functional_value': self.functional_value,
            'objective': self.objective, 'phase': self.phase,
            'boundary_derivative_min': self.boundary_derivative_min,
            'boundary_derivative_angle': self.boundary_derivative_angle,
            'zero_angles': self.zero_angles,
            'second_derivative_at_zeros': self.second_derivative_at_zeros,
            'certificate': self.certificate.to_dict(),
            'alternatives': [a.to_dict() for a in self.alternatives],
            'converged': self.converged,
            'n_feasible_starts': self.n_feasible_starts}


class ExtremalSearch(BaseEstimator):
  """Multi-start Nelder-Mead maximization of a linear functional over the
  univalent polynomials of degree at most n.

  Candidates are parametrized by ``(Re a_2, Im a_2, ..., Im a_n)``. Points
  not certified univalent score ``-inf``. Every start is a random point of
  the region ``sum k |a_k| < 1`` (all univalent); the simplex search is
  restarted with a halved simplex until it stops improving, then the
  candidate is pushed radially to the edge of the feasible region if that
  improves the objective. Feasibility during the search is decided at
  `search_samples`; the distinct best candidates are then certified at
  `certify_samples` by :func:`retract_to_certified` and ranked again.

  Parameters
  ----------
  n_starts : int, optional (default=32)

  max_iter : int or None, optional (default=None)
    Iterations per simplex run; None uses scipy's default.

  max_restarts : int, optional (default=8)

  xatol, fatol : float, optional (default=1e-10, 1e-12)
    Simplex convergence tolerances.

  search_samples : int, optional (default=512)
    Boundary samples M of the certifications run during the search.

  certify_samples : int, optional (default=4096)
    M of the final certificate.

  objective : {'modulus', 'real'}, optional (default='modulus')
    Maximize ``|L(p)|`` or ``Re L(p)``.

  polish : bool, optional (default=True)
    Whether to push candidates to the edge of the feasible region.

  zero_tol, simplicity_tol : float, optional (default=1e-4, 1e-3)
    Boundary-zero and simple-zero thresholds of the report.

  constant_tol : float, optional (default=1e-10)
    Variation of L over sample polynomials below which L is constant.

  alternative_ratio, alternative_distance : float, optional
    (default=0.999, 1e-3)
    Local maxima with objective at least `alternative_ratio` times the best
    and coefficients farther than `alternative_distance` from every kept
    one are reported as alternatives.

  random_state : int or numpy.RandomState or None, optional (default=0)

  verbose : bool, optional (default=False)

  Attributes
  ----------
  result_ : ExtremalResult

  n_iter_ : int
    Total simplex iterations.

  converged_ : bool

  Examples
  --------
  >>> from schlicht.analytic import LinearFunctional
  >>> search = ExtremalSearch(n_starts=4).fit(
  ...     LinearFunctional.coefficient_index(2), 2)
  >>> abs(search.result_.objective - 0.5) < 1e-6
  True
  """

  def __init__(self, n_starts=32, max_iter=None, max_restarts=8,
               xatol=1e-10, fatol=1e-12, search_samples=512,
               certify_samples=4096, objective='modulus', polish=True,
               zero_tol=ZERO_TOL, simplicity_tol=SIMPLICITY_TOL,
               constant_tol=1e-10, alternative_ratio=0.999,
               alternative_distance=1e-3, random_state=0, verbose=False):
    self.n_starts = n_starts
    self.max_iter = max_iter
    self.max_restarts = max_restarts
    self.xatol = xatol
    self.fatol = fatol
    self.search_samples = search_samples
    self.certify_samples = certify_samples
    self.objective = objective
    self.polish = polish
    self.zero_tol = zero_tol
    self.simplicity_tol = simplicity_tol
    self.constant_tol = constant_tol
    self.alternative_ratio = alternative_ratio
    self.alternative_distance = alternative_distance
    self.random_state = random_state
    self.verbose = verbose

  def _value(self, L, p):
    value = L.on_coefficients(p.full_coefficients)
    return abs(value) if self.objective == 'modulus' else value.real

  def _check_constant(self, L, n):
    base = L.on_coefficients([0, 1])
    variation = 0.
    for k in range(2, n + 1):
      for phase in np.arange(4) * np.pi / 2:
        a = np.zeros(n + 1, dtype=complex)
        a[1], a[k] = 1, np.exp(1j * phase) / (2 * k)
        variation = max(variation, abs(L.on_coefficients(a) - base))
    if variation < self.constant_tol:
      raise ConstantFunctional(
          '{} does not vary over degree-{} univalent polynomials (variation '
          '{:.3g}).'.format(L, n, variation))

  def _random_start(self, rng, n):
    k = np.arange(2, n + 1)
    radius = 0.9 / (k * (n - 1)) * np.sqrt(rng.uniform(size=n - 1))
    angle = rng.uniform(0, 2 * np.pi, size=n - 1)
    return PolynomialCandidate(radius * np.exp(1j * angle), n).to_vector()

  def _local_search(self, score, x0):
    x, fx = x0, score(x0)
    scale, nit, converged = 0.1, 0, True
    for _ in range(self.max_restarts + 1):
      simplex = np.vstack([x, x + scale * np.eye(len(x))])
      options = {'initial_simplex': simplex, 'xatol': self.xatol,
                 'fatol': self.fatol}
      if self.max_iter is not None:
        options['maxiter'] = self.max_iter
      res = minimize(score, x, method='Nelder-Mead', options=options)
      nit += res.nit
      converged = res.status == 0
      if not res.fun < fx - self.fatol:
        break
      x, fx = res.x, res.fun
      scale /= 2
    return x, fx, nit, converged

  def _push_to_edge(self, score, x, fx, n_bisections=60):
    """Largest feasible ``s * x`` with ``s >= 1``, kept if it scores
    better."""
    if not np.any(x):
      return x, fx
    lo, hi = 1., 2.
    while np.isfinite(score(hi * x)) and hi < 2 ** 20:
      lo, hi = hi, 2 * hi
    for _ in range(n_bisections):
      mid = (lo + hi) / 2
      if np.isfinite(score(mid * x)):
        lo = mid
      else:
        hi = mid
    f_edge = score(lo * x)
    if f_edge < fx:
      return lo * x, f_edge
    return x, fx

  def fit(self, L, n):
    """Searches for a maximizer of the objective over degree-n univalent
    polynomials.

    Parameters
    ----------
    L : LinearFunctional

    n : int
      Degree cap, at least 2.

    Returns
    -------
    self : object
      Returns the instance itself.
    """
    check_scalar(n, 'n', numbers.Integral, min_val=2)
    check_scalar(self.n_starts, 'n_starts', numbers.Integral, min_val=1)
    if self.objective not in ('modulus', 'real'):
      raise ValueError("objective must be 'modulus' or 'real', got {!r}."
                       .format(self.objective))
    self._check_constant(L, n)
    rng = check_random_state(self.random_state)
    M = self.search_samples
    cache = {}

    def score(x):
      key = np.asarray(x, dtype=float).tobytes()
      if key not in cache:
        p = PolynomialCandidate.from_vector(x, n)
        cache[key] = -self._value(L, p) if _is_feasible(p, M) else np.inf
      return cache[key]

    optima, total_iter, all_converged = [], 0, True
    for start in range(self.n_starts):
      x0 = self._random_start(rng, n)
      if not np.isfinite(score(x0)):
        continue
      x, fx, nit, converged = self._local_search(score, x0)
      if self.polish:
        x, fx = self._push_to_edge(score, x, fx)
      total_iter += nit
      all_converged &= converged
      optima.append((fx, x))
      if self.verbose:
        print('[ExtremalSearch] start {}/{}: objective {:.10f}'
              .format(start + 1, self.n_starts, -fx))
    if not optima:
      raise NoFeasibleStart('None of the {} starts was certified univalent.'
                            .format(self.n_starts))

    optima.sort(key=lambda item: item[0])
    best_f = optima[0][0]
    distinct = []
    for fx, x in optima:
      if -fx < self.alternative_ratio * -best_f:
        break
      if all(np.linalg.norm(x - y) > self.alternative_distance
             for y in distinct):
        distinct.append(x)
    # the edge found at search_samples may lie outside the certified region
    ranked = []
    for x in distinct:
      q, certificate = retract_to_certified(
          PolynomialCandidate.from_vector(x, n), self.certify_samples)
      ranked.append((-self._value(L, q), q, certificate))
    ranked.sort(key=lambda item: item[0])
    _, p, certificate = ranked[0]
    if self.verbose:
      print('[ExtremalSearch] best candidate {} at M={}: objective {:.10f}'
            .format(certificate.verdict, self.certify_samples,
                    self._value(L, p)))
    if not certificate.certified:
      all_converged = False
    if not all_converged:
      warnings.warn('ExtremalSearch did not fully converge: some simplex runs '
                    'hit their iteration limit or the best candidate is not '
                    'certified at M={}.'.format(self.certify_samples),
                    ConvergenceWarning)
    zeros = boundary_zero_angles(p, max(1024, self.certify_samples),
                                 self.zero_tol)
    value = L.on_coefficients(p.full_coefficients)
    self.n_iter_ = total_iter
    self.converged_ = all_converged
    self.result_ = ExtremalResult(
        polynomial=p, functional_value=value,
        objective=self._value(L, p), phase=float(np.angle(value)),
        boundary_minimum=boundary_derivative_min(p, 1024),
        zero_angles=[z.angle for z in zeros],
        second_derivative_at_zeros=[
            zero_simplicity_check(p, z.angle, self.zero_tol) for z in zeros],
        certificate=certificate,
        alternatives=[q for _, q, _ in ranked[1:]],
        converged=all_converged, functional=str(L),
        n_feasible_starts=len(optima))
    return self


def maximize_functional(L, n, **config):
  """Runs :class:`ExtremalSearch` with `config` and returns its
  :class:`ExtremalResult`."""
  return ExtremalSearch(**config).fit(L, n).result_

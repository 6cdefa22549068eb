"""
Convex decomposition of a normalized map omitting two values of equal
modulus into ``2**n`` normalized univalent components, and the fixed point
of the recursion ``g -> w +/- Psi(g)``.
"""
import numbers
import warnings

import numpy as np
from numpy.polynomial import Polynomial
from sklearn.base import BaseEstimator
from sklearn.metrics import pairwise_distances
from sklearn.utils import check_scalar
from sklearn.utils.validation import check_is_fitted

from ._util import check_points, circle_nodes, unwrap_scalar
from .analytic import (BranchPath, continue_psi, psi_eval, psi_prime,
                       STEP_FRACTION)
from .exceptions import (BranchPointCollision, CapExceeded, DegeneratePair,
                         InvariantWarning, NonPositiveCoefficient, NotOmitted,
                         PathHitsBranchPoint, PoleAtMidpoint)

MAX_LEVELS = 12
INVARIANT_TOL = 1e-9
DEGENERACY_TOL = 1e-12


class SignWord(object):
  """Choice of sign (+1 for ``w + Psi``, -1 for ``w - Psi``) at every level
  of the recursion.

  Words of a given length are enumerated in binary-counter order, the
  first level being the most significant bit and +1 the bit 0, so that
  index 0 is ``(+, +, ..., +)``.

  Examples
  --------
  >>> [str(w) for w in SignWord.enumerate(2)]
  ['++', '+-', '-+', '--']
  """

  def __init__(self, signs):
    signs = tuple(int(s) for s in signs)
    if any(s not in (1, -1) for s in signs):
      raise ValueError('Signs must be +1 or -1, got {}.'.format(signs))
    self.signs = signs

  @classmethod
  def from_index(cls, index, n):
    if not 0 <= index < 2 ** n:
      raise ValueError('Index {} out of range for words of length {}.'
                       .format(index, n))
    return cls(-1 if (index >> (n - 1 - level)) & 1 else 1
               for level in range(n))

  @classmethod
  def from_string(cls, text):
    return cls(1 if c == '+' else -1 if c == '-' else 0 for c in text)

  @classmethod
  def enumerate(cls, n):
    return [cls.from_index(i, n) for i in range(2 ** n)]

  @property
  def index(self):
    n = len(self.signs)
    return sum(1 << (n - 1 - level)
               for level, s in enumerate(self.signs) if s < 0)

  def prefix(self, k):
    return SignWord(self.signs[:k])

  def extended(self, sign):
    return SignWord(self.signs + (sign,))

  def __len__(self):
    return len(self.signs)

  def __iter__(self):
    return iter(self.signs)

  def __getitem__(self, k):
    return self.signs[k]

  def __eq__(self, other):
    return isinstance(other, SignWord) and self.signs == other.signs

  def __hash__(self):
    return hash(self.signs)

  def __str__(self):
    return ''.join('+' if s > 0 else '-' for s in self.signs)

  def __repr__(self):
    return 'SignWord({!r})'.format(str(self))


class DecompositionNode(object):
  """A node of the recursion tree: the function ``g_word`` at 0.

  Attributes
  ----------
  word : SignWord

  value_at_zero : complex
    ``X = g_word(0)``.

  derivative_at_zero : complex
    ``g_word'(0)``, the product over levels of ``1 +/- Psi'(X_parent)``.

  psi_at_value : complex
    Continued branch value ``Psi(X)``.

  psi_prime_at_value : complex
    ``Psi'(X)``.
  """

  def __init__(self, word, value_at_zero, derivative_at_zero, psi_at_value,
               psi_prime_at_value):
    self.word = word
    self.value_at_zero = complex(value_at_zero)
    self.derivative_at_zero = complex(derivative_at_zero)
    self.psi_at_value = complex(psi_at_value)
    self.psi_prime_at_value = complex(psi_prime_at_value)

  def violations(self, pair, tol=INVARIANT_TOL):
    """Names of the tree invariants this node breaks (empty if none)."""
    x = self.value_at_zero
    broken = []
    gap = abs(abs(x - pair.alpha) - abs(x - pair.beta))
    if gap > tol * (1 + abs(x)):
      broken.append('equal_distance')
    d = self.psi_prime_at_value
    if abs(d.imag) > tol or not -1 + tol < d.real < 1 - tol:
      broken.append('psi_prime_range')
    return broken

  def to_dict(self):
    return {'word': str(self.word), 'value_at_zero': self.value_at_zero,
            'derivative_at_zero': self.derivative_at_zero,
            'psi_at_value': self.psi_at_value,
            'psi_prime_at_value': self.psi_prime_at_value}

  def __repr__(self):
    return 'DecompositionNode(word={!r}, X={!r}, dg={!r})'.format(
        str(self.word), self.value_at_zero, self.derivative_at_zero)


def _grow_tree(pair, n, step_fraction=STEP_FRACTION, n_path_points=65):
  """All levels of the tree, ``levels[k]`` holding the ``2**k`` nodes of
  depth k in binary-counter order."""
  if abs(pair.psi_prime0) >= 1 - DEGENERACY_TOL:
    raise DegeneratePair("|Psi'(0)| = |cos((theta - phi)/2)| is 1 for {!r}."
                         .format(pair))
  root = DecompositionNode(SignWord(()), 0j, 1., pair.psi0, pair.psi_prime0)
  levels = [[root]]
  t = np.linspace(0., 1., n_path_points)
  for depth in range(n):
    parents = levels[-1]
    x = np.array([p.value_at_zero for p in parents])
    psi = np.array([p.psi_at_value for p in parents])
    dpsi = np.array([p.psi_prime_at_value for p in parents])
    deriv = np.array([p.derivative_at_zero for p in parents])
    signs = np.tile([1., -1.], len(parents))
    x_parent = np.repeat(x, 2)
    factors = 1 + signs * np.repeat(dpsi, 2)
    if np.any(np.abs(factors) <= DEGENERACY_TOL):
      raise DegeneratePair('A level factor 1 +/- Psi\' vanishes at depth {}.'
                           .format(depth + 1))
    x_child = x_parent + signs * np.repeat(psi, 2)
    try:
      pair.check_clear(x_child)
    except PathHitsBranchPoint as e:
      raise BranchPointCollision(str(e))
    paths = x_parent[:, None] + (x_child - x_parent)[:, None] * t[None, :]
    psi_child = continue_psi(pair, paths, np.repeat(psi, 2),
                             step_fraction=step_fraction)[:, -1]
    dpsi_child = psi_prime(pair, x_child, psi_child)
    deriv_child = np.repeat(deriv, 2) * factors
    levels.append([
        DecompositionNode(parents[k // 2].word.extended(int(signs[k])),
                          x_child[k], deriv_child[k], psi_child[k],
                          dpsi_child[k])
        for k in range(len(x_child))])
  return levels


def build_tree(pair, n, cap=MAX_LEVELS, step_fraction=STEP_FRACTION):
  """Leaves of the recursion ``g_k = g_{k-1} +/- Psi(g_{k-1})`` at 0.

  Parameters
  ----------
  pair : OmittedPair

  n : int
    Depth of the tree, at most `cap`.

  Returns
  -------
  leaves : list of DecompositionNode
    The ``2**n`` leaves in binary-counter order.

  Examples
  --------
  >>> from schlicht.analytic import OmittedPair
  >>> [str(node.word) for node in build_tree(OmittedPair(2, -2), 1)]
  ['+', '-']
  """
  check_scalar(n, 'n', numbers.Integral, min_val=0)
  if n > cap:
    raise CapExceeded('Tree depth {} exceeds the cap {}.'.format(n, cap))
  return _grow_tree(pair, n, step_fraction)[-1]


def _leaf_values(pair, levels, base_paths, step_fraction=STEP_FRACTION):
  """``g_word(w)`` for every leaf and every base path from 0 to w.

  Returns an array of shape ``(2**n, n_paths)``. At each level Psi is
  continued along the image of the base path under the parent function,
  starting from the parent's tree value.
  """
  base_paths = np.atleast_2d(np.asarray(base_paths, dtype=complex))
  n_paths, n_points = base_paths.shape
  current = base_paths[None]
  for parents in levels[:-1]:
    m = len(parents)
    start = np.repeat([p.psi_at_value for p in parents], n_paths)
    psi = continue_psi(pair, current.reshape(m * n_paths, n_points), start,
                       step_fraction=step_fraction)
    psi = psi.reshape(m, n_paths, n_points)
    current = np.stack([current + psi, current - psi], axis=1)
    current = current.reshape(2 * m, n_paths, n_points)
  return current[:, :, -1]


def g_eval(pair, word, w, path=None, step_fraction=STEP_FRACTION):
  """Value at `w` of the leaf function ``g_word``.

  Parameters
  ----------
  pair : OmittedPair

  word : SignWord or sequence of +1/-1 or string of '+'/'-'

  w : complex

  path : BranchPath, array-like or None
    Path from 0 to `w`; defaults to the straight segment.
  """
  if isinstance(word, str):
    word = SignWord.from_string(word)
  elif not isinstance(word, SignWord):
    word = SignWord(word)
  w = complex(w)
  if path is None:
    path = BranchPath.segment(0, w)
  elif not isinstance(path, BranchPath):
    path = BranchPath(path)
  if abs(path.start) > pair.tol or \
     abs(path.end - w) > pair.tol * (1 + abs(w)):
    raise ValueError('The path must run from 0 to w = {!r}.'.format(w))
  if len(word) > MAX_LEVELS:
    raise CapExceeded('Word length {} exceeds the cap {}.'
                      .format(len(word), MAX_LEVELS))
  levels = _grow_tree(pair, len(word), step_fraction)
  values = _leaf_values(pair, levels, path.waypoints, step_fraction)
  return complex(values[word.index, 0])


class ConvexDecomposition(BaseEstimator):
  """Decomposition ``f = sum_j alpha_j f_j`` of a normalized map omitting
  two values of equal modulus.

  The ``2**n`` components are ``f_j = (g_j(f) - g_j(0)) / g_j'(0)`` where
  ``g_j`` are the leaves of the recursion ``g_k = g_{k-1} +/- Psi(g_{k-1})``
  started at ``g_0(w) = w``; the weights are ``alpha_j = g_j'(0) / 2**n``.

  Parameters
  ----------
  n_levels : int, optional (default=1)
    Depth n of the recursion (``2**n`` components).

  max_levels : int, optional (default=12)
    Cap on `n_levels`.

  n_path_points : int, optional (default=256)
    Samples of the radial segment whose image carries the continuation of
    Psi when evaluating components.

  step_fraction : float, optional (default=1e-2)
    Continuation step as a fraction of the distance to the branch points.

  omission_radius : float, optional (default=0.999)
    Radius of the circle on which omission of the pair is spot-checked.

  omission_samples : int, optional (default=2048)

  omission_tol : float, optional (default=1e-6)
    Minimal admissible distance of the sampled image to alpha and beta.

  invariant_tol : float, optional (default=1e-9)
    Tolerance of the node invariants and of coefficient positivity.

  verbose : bool, optional (default=False)
    Whether to print progress messages.

  Attributes
  ----------
  levels_ : list of lists of DecompositionNode
    Every level of the tree, root first.

  nodes_ : list of DecompositionNode
    The leaves.

  coefficients_ : `numpy.ndarray`, shape=(2**n_levels,)
    The weights alpha_j, positive with unit sum.

  components_ : list of DecompositionComponent
    Evaluators of the normalized components f_j.

  invariant_violations_ : list of (str, str)
    (word, invariant) pairs of the nodes that break a tree invariant.

  Examples
  --------
  >>> from schlicht.analytic import OmittedPair, MapSpec
  >>> d = ConvexDecomposition(n_levels=1).fit(OmittedPair(2, -2),
  ...                                         MapSpec.identity())
  >>> d.coefficients_
  array([0.5, 0.5])
  """

  def __init__(self, n_levels=1, max_levels=MAX_LEVELS, n_path_points=256,
               step_fraction=STEP_FRACTION, omission_radius=0.999,
               omission_samples=2048, omission_tol=1e-6,
               invariant_tol=INVARIANT_TOL, verbose=False):
    self.n_levels = n_levels
    self.max_levels = max_levels
    self.n_path_points = n_path_points
    self.step_fraction = step_fraction
    self.omission_radius = omission_radius
    self.omission_samples = omission_samples
    self.omission_tol = omission_tol
    self.invariant_tol = invariant_tol
    self.verbose = verbose

  @property
  def n(self):
    return self.n_levels

  def _check_params(self):
    check_scalar(self.n_levels, 'n_levels', numbers.Integral, min_val=0)
    check_scalar(self.max_levels, 'max_levels', numbers.Integral, min_val=0)
    if self.n_levels > self.max_levels:
      raise CapExceeded('n_levels={} exceeds max_levels={}.'
                        .format(self.n_levels, self.max_levels))
    check_scalar(self.n_path_points, 'n_path_points', numbers.Integral,
                 min_val=2)
    check_scalar(self.omission_radius, 'omission_radius', numbers.Real,
                 min_val=0, max_val=1, include_boundaries='neither')
    check_scalar(self.omission_samples, 'omission_samples', numbers.Integral,
                 min_val=1)

  def _check_omission(self, pair, base_map):
    _, points = circle_nodes(self.omission_samples, self.omission_radius)
    values = np.asarray(base_map(points), dtype=complex)
    distance = pair.branch_distance(values)
    k = np.argmin(distance)
    if distance[k] < self.omission_tol:
      raise NotOmitted(values[k], points[k])
    # a value enclosed by the image circle is attained inside it
    for value in pair.branch_points:
      d = values - value
      winding = np.angle(np.roll(d, -1) / d).sum() / (2 * np.pi)
      if abs(winding) > 0.5:
        raise NotOmitted(value, 'inside |z| < {}'.format(self.omission_radius))

  def fit(self, pair, base_map):
    """Builds the recursion tree and the weights.

    Parameters
    ----------
    pair : OmittedPair

    base_map : MapSpec or callable
      A normalized map omitting ``pair.alpha`` and ``pair.beta``.

    Returns
    -------
    self : object
      Returns the instance itself.
    """
    self._check_params()
    self._check_omission(pair, base_map)
    levels = _grow_tree(pair, self.n_levels, self.step_fraction)
    if self.verbose:
      for depth, nodes in enumerate(levels[1:], 1):
        print('[ConvexDecomposition] level {}/{}: {} nodes'
              .format(depth, self.n_levels, len(nodes)))
    leaves = levels[-1]
    derivatives = np.array([node.derivative_at_zero for node in leaves])
    bad = (np.abs(derivatives.imag) >
           self.invariant_tol * np.maximum(1, np.abs(derivatives))) | \
        (derivatives.real <= 0)
    if np.any(bad):
      k = np.argmax(bad)
      raise NonPositiveCoefficient(
          "g'(0) = {!r} for the word {!r} is not positive; the branch of Psi "
          "was lost.".format(derivatives[k], str(leaves[k].word)))

    self.invariant_violations_ = [
        (str(node.word), name) for nodes in levels[1:] for node in nodes
        for name in node.violations(pair, self.invariant_tol)]
    if self.invariant_violations_:
      warnings.warn('{} tree node invariant(s) violated, first: {}'
                    .format(len(self.invariant_violations_),
                            self.invariant_violations_[0]), InvariantWarning)

    self.pair_ = pair
    self.base_map_ = base_map
    self.levels_ = levels
    self.nodes_ = leaves
    self.coefficients_ = derivatives.real / 2 ** self.n_levels
    self.components_ = [DecompositionComponent(self, j)
                        for j in range(len(leaves))]
    return self

  def leaf_values(self, z):
    """``g_j(f(z))`` for every leaf, shape ``(2**n, n_points)``."""
    check_is_fitted(self, 'coefficients_')
    points, _ = check_points(z)
    radial = np.linspace(0., 1., self.n_path_points)
    base_paths = np.asarray(self.base_map_(points[:, None] * radial[None, :]),
                            dtype=complex)
    return _leaf_values(self.pair_, self.levels_, base_paths,
                        self.step_fraction)

  def component_values(self, z):
    """Normalized components ``f_j(z)``, shape ``(2**n, n_points)``."""
    values = self.leaf_values(z)
    x = np.array([node.value_at_zero for node in self.nodes_])
    dg = np.array([node.derivative_at_zero for node in self.nodes_])
    return (values - x[:, None]) / dg.real[:, None]

  def reconstruct(self, z):
    """``sum_j alpha_j f_j(z)``."""
    points, scalar = check_points(z)
    return unwrap_scalar(self.coefficients_ @ self.component_values(points),
                         scalar)

  @property
  def closed_form_residual_(self):
    """Mismatch between the continued ``|Psi'(0)|`` and
    ``|cos((theta - phi) / 2)|``."""
    pair = self.pair_
    return abs(abs(pair.psi_prime0) - abs(np.cos((pair.theta - pair.phi) / 2)))

  def to_dict(self):
    check_is_fitted(self, 'coefficients_')
    return {'pair': self.pair_.to_dict(),
            'base_map': self.base_map_.to_dict()
            if hasattr(self.base_map_, 'to_dict') else repr(self.base_map_),
            'n': self.n_levels,
            'coefficients': self.coefficients_,
            'coefficient_sum': float(np.sum(self.coefficients_)),
            'leaves': [node.to_dict() for node in self.nodes_],
            'closed_form_residual': self.closed_form_residual_,
            'invariant_violations': self.invariant_violations_}


class DecompositionComponent(object):
  """Evaluator of the normalized component ``f_j`` of a decomposition."""

  def __init__(self, decomposition, index):
    self.decomposition = decomposition
    self.index = index

  @property
  def word(self):
    return self.decomposition.nodes_[self.index].word

  def __call__(self, z):
    points, scalar = check_points(z)
    values = self.decomposition.component_values(points)[self.index]
    return unwrap_scalar(values, scalar)

  def __repr__(self):
    return 'DecompositionComponent(word={!r})'.format(str(self.word))


def decompose(pair, base_map, n, **params):
  """Fits a :class:`ConvexDecomposition` of depth `n`; extra keyword
  arguments are passed to its constructor."""
  return ConvexDecomposition(n_levels=n, **params).fit(pair, base_map)


def verify_reconstruction(d, sample_points):
  """``max |f(z) - sum_j alpha_j f_j(z)|`` over the sample points."""
  points, _ = check_points(sample_points)
  f = np.asarray(d.base_map_(points), dtype=complex)
  return float(np.max(np.abs(f - d.reconstruct(points))))


def verify_disjointness(d, sample_points):
  """Smallest distance between the images of two distinct leaves.

  The images compared are those of ``g_j o f``, whose pairwise disjointness
  makes the normalized components disjoint up to the affine maps; the
  normalized ``f_j`` themselves all pass through 0.
  Returns ``inf`` for a single component.
  """
  points, _ = check_points(sample_points)
  values = d.leaf_values(points)
  if len(values) < 2:
    return np.inf
  planar = np.stack([values.real, values.imag], axis=-1)
  best = np.inf
  for i in range(len(planar)):
    for j in range(i + 1, len(planar)):
      best = min(best, pairwise_distances(planar[i], planar[j]).min())
  return float(best)


def verify_partition(pair, n, w, n_path_points=256,
                     step_fraction=STEP_FRACTION):
  """``max |sum_j g_j(w) - 2**n w| / (2**n (1 + |w|))`` over the points w,
  each reached by the straight segment from 0.

  The two children of a node sum to twice their parent, so the leaves of a
  tree of depth n sum to ``2**n w`` whatever branch is followed.
  """
  w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
  levels = _grow_tree(pair, n, step_fraction)
  t = np.linspace(0., 1., n_path_points)
  values = _leaf_values(pair, levels, w[:, None] * t[None, :], step_fraction)
  scale = 2 ** n * (1 + np.abs(w))
  return float(np.max(np.abs(values.sum(axis=0) - 2 ** n * w) / scale))


def fixed_point(pair, w, tol=1e-12):
  """The common fixed point ``(w**2 - alpha beta) / (2w - alpha - beta)``
  of ``g -> w +/- Psi(g)``.

  Raises
  ------
  PoleAtMidpoint
    If ``2w = alpha + beta``.

  Examples
  --------
  >>> from schlicht.analytic import OmittedPair
  >>> fixed_point(OmittedPair(2, -2), 1)
  (2.5+0j)
  """
  w = complex(w)
  denominator = 2 * w - pair.alpha - pair.beta
  if abs(denominator) <= tol * (1 + abs(w) + pair.radius):
    raise PoleAtMidpoint(w)
  return (w * w - pair.product) / denominator


def verify_fixed_point(pair, w):
  """``|(g - w)**2 - (g - alpha)(g - beta)|`` at the fixed point g."""
  g = fixed_point(pair, w)
  return abs((g - complex(w)) ** 2 - (g - pair.alpha) * (g - pair.beta))


def _segment_distance(c, t):
  if t == 0:
    return abs(c)
  s = min(max((c * np.conj(t)).real / abs(t) ** 2, 0.), 1.)
  return abs(c - s * t)


def _psi_continued(pair, target, step_fraction):
  """Psi at `target` continued from ``Psi(0)`` along the segment from 0, or
  through ``(1 + 1j) target / 2`` when the segment passes close to a branch
  point."""
  clearance = min(_segment_distance(c, target)
                  for c in (pair.alpha, pair.beta))
  path = None
  if clearance < 1e-2 * (1 + abs(target)):
    path = BranchPath.through([0, (1 + 1j) * target / 2, target], 129)
  return psi_eval(pair, target, path=path, step_fraction=step_fraction)


def branch_fixed_point_residual(pair, w, signs, step_fraction=STEP_FRACTION):
  """``|g - u_m|`` at the common fixed point g, where ``u_0 = g`` and
  ``u_k = w + s_k Psi(u_{k-1})`` with Psi continued from ``Psi(0)``.

  Squaring frees :func:`rationalized_fixed_point` of the signs, so it
  returns the same point for every word. With the continued branch only
  the words whose signs match the branch at g leave a small residual: at
  every depth exactly one word, ``(s, s, ...)`` with ``g - w = s Psi(g)``,
  is a genuine fixed point of the composed recursion.

  Examples
  --------
  >>> from schlicht.analytic import OmittedPair
  >>> pair = OmittedPair(2, -2)
  >>> sorted(round(branch_fixed_point_residual(pair, 1, s), 9)
  ...        for s in ('+', '-'))
  [0.0, 3.0]
  """
  if isinstance(signs, str):
    signs = SignWord.from_string(signs)
  elif not isinstance(signs, SignWord):
    signs = SignWord(signs)
  w = complex(w)
  g = fixed_point(pair, w)
  u = g
  for s in signs:
    u = w + s * _psi_continued(pair, u, step_fraction)
  return abs(g - u)


def rationalized_fixed_point(pair, w, signs, tol=1e-10):
  """Fixed point of the composed recursion for a sign word of depth 1 or 2.

  The equation ``g = w + s2 Psi(w + s1 Psi(g))`` is freed of its square
  roots by squaring (the signs enter only through their squares), which
  leaves a polynomial equation in g whose degree collapses to one:
  ``(a - b)**2 (2w - a - b) g = (a - b)**2 (w**2 - a b)``.
  Its root is returned.
  """
  if not isinstance(signs, SignWord):
    signs = SignWord(signs)
  a, b, w = pair.alpha, pair.beta, complex(w)
  g = Polynomial([0j, 1.])
  psi_sq = (g - a) * (g - b)
  if len(signs) == 1:
    s, = signs
    equation = (g - w) ** 2 - s ** 2 * psi_sq
  elif len(signs) == 2:
    s1, s2 = signs
    # (g-w)**2 - s2**2 ((w-a)(w-b) + Psi(g)**2) = s2**2 s1 Psi(g) (2w-a-b)
    lhs = (g - w) ** 2 - s2 ** 2 * ((w - a) * (w - b) + psi_sq)
    equation = lhs ** 2 - (s2 ** 2 * s1) ** 2 * (2 * w - a - b) ** 2 * psi_sq
  else:
    raise ValueError('Only sign words of depth 1 or 2 are supported, got {}.'
                     .format(len(signs)))
  scale = np.max(np.abs(equation.coef))
  equation = equation.trim(tol * scale)
  if equation.degree() < 1:
    raise PoleAtMidpoint(w)
  if equation.degree() > 1:
    raise ArithmeticError('The rationalized equation kept degree {}.'
                          .format(equation.degree()))
  c0, c1 = equation.coef[:2]
  return complex(-c0 / c1)

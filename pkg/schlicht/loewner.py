"""
Radial Loewner chains ``df/dt = -f (1 + kappa f) / (1 - kappa f)`` with
``f(z, 0) = z``, the tail integrals they generate and the decomposition of
the variational integral of a support point.
"""
import numbers

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import interp1d
from sklearn.base import BaseEstimator
from sklearn.utils import check_scalar

from ._util import check_points, unwrap_scalar
from .analytic import (LinearFunctional, MapSpec, DEFAULT_RADIUS,
                       DEFAULT_SAMPLES)
from .exceptions import (HorizonExceeded, RootSelectionAmbiguous,
                         SchlichtError, SingularityApproach, TailBoundLoose)

TAIL_SPAN = 25.
MIN_TAIL_SPAN = 20.


class DrivingFunction(object):
  """Unimodular driving function ``s -> kappa(s)``.

  Parameters
  ----------
  kappa : complex, optional (default=-1)
    Value of a constant driving function.

  times, values : array-like or None
    Samples of a tabulated driving function. Between samples the argument
    is interpolated linearly (after unwrapping), after the last sample it
    is held constant.

  limit : complex or None
    ``lim kappa(s)`` as s grows, which is the conjugate of the preimage of
    the slit tip. Defaults to `kappa` or to the last tabulated value.

  Examples
  --------
  >>> DrivingFunction.constant(-1)(np.array([0., 3.]))
  array([-1.+0.j, -1.+0.j])
  """

  def __init__(self, kappa=-1., times=None, values=None, limit=None,
               tol=1e-12):
    self.tol = tol
    if times is None:
      self.kind = 'constant'
      self.kappa = self._check_unimodular(kappa)
      self.times = self.values = None
      self.limit = self.kappa if limit is None else \
          self._check_unimodular(limit)
      if abs(self.limit - self.kappa) > tol:
        raise ValueError('The limit of a constant driving function is its '
                         'value.')
      return
    self.kind = 'tabulated'
    self.times = np.asarray(times, dtype=float).ravel()
    self.values = np.asarray(values, dtype=complex).ravel()
    if len(self.times) != len(self.values) or len(self.times) < 2:
      raise ValueError('Need at least two (time, value) samples of equal '
                       'count.')
    if np.any(np.diff(self.times) <= 0) or self.times[0] < 0:
      raise ValueError('Sample times must be nonnegative and increasing.')
    for v in self.values:
      self._check_unimodular(v)
    self.kappa = None
    self.limit = complex(self.values[-1]) if limit is None else \
        self._check_unimodular(limit)
    angles = np.unwrap(np.angle(self.values))
    self._angle = interp1d(self.times, angles, bounds_error=False,
                           fill_value=(angles[0], angles[-1]),
                           assume_sorted=True)

  def _check_unimodular(self, value):
    value = complex(value)
    if abs(abs(value) - 1) > self.tol:
      raise ValueError('Driving values must be unimodular, got |{!r}| = {}.'
                       .format(value, abs(value)))
    return value

  @classmethod
  def constant(cls, kappa):
    return cls(kappa=kappa)

  @classmethod
  def tabulated(cls, times, values, limit=None):
    return cls(times=times, values=values, limit=limit)

  def __call__(self, s):
    s = np.asarray(s, dtype=float)
    if self.kind == 'constant':
      return np.full(s.shape, self.kappa)
    return np.exp(1j * self._angle(s))

  def to_dict(self):
    out = {'kind': self.kind, 'limit': self.limit}
    if self.kind == 'constant':
      out['kappa'] = self.kappa
    else:
      out.update(times=self.times, values=self.values)
    return out

  def __repr__(self):
    if self.kind == 'constant':
      return 'DrivingFunction.constant({!r})'.format(self.kappa)
    return 'DrivingFunction.tabulated(<{} samples>)'.format(len(self.times))


class LoewnerChain(BaseEstimator):
  """Radial Loewner chain driven by `driving`, integrated by an adaptive
  embedded Runge-Kutta pair.

  The state integrated is ``F = e^s f(z, s)``, which stays of order one
  and tends to the limit map; ``f = e^{-s} F``.

  Parameters
  ----------
  driving : DrivingFunction or None
    Defaults to the constant -1, whose chain tends to the Koebe function.

  method : str, optional (default='DOP853')
    Integrator passed to :func:`scipy.integrate.solve_ivp`.

  rtol, atol : float, optional (default=1e-10, 1e-12)
    Relative and absolute local error tolerances.

  first_step : float or None, optional (default=None)

  max_step : float, optional (default=inf)

  horizon : float, optional (default=40)
    Largest admissible time of :meth:`solve`.

  domain_radius : float, optional (default=0.95)
    Largest admissible ``|z|`` of :meth:`solve`.

  singular_tol : float, optional (default=1e-6)
    Integration stops when ``|1 - kappa f|`` drops below this value.

  Examples
  --------
  >>> chain = LoewnerChain()
  >>> abs(chain.solve(0.5, 0.) - 0.5) == 0
  True
  """

  def __init__(self, driving=None, method='DOP853', rtol=1e-10, atol=1e-12,
               first_step=None, max_step=np.inf, horizon=40.,
               domain_radius=0.95, singular_tol=1e-6):
    self.driving = driving
    self.method = method
    self.rtol = rtol
    self.atol = atol
    self.first_step = first_step
    self.max_step = max_step
    self.horizon = horizon
    self.domain_radius = domain_radius
    self.singular_tol = singular_tol

  @property
  def driving_function(self):
    if self.driving is None:
      return DrivingFunction.constant(-1.)
    return self.driving

  def _rhs(self, terms, fhat, z0bar):
    kappa = self.driving_function

    def rhs(s, y):
      F = y[:len(y) // (1 + len(terms))]
      k = kappa(s)
      x = k * np.exp(-s) * F
      out = [-2 * F * x / (1 - x)]
      for term in terms:
        if term == 'full':
          out.append(F * x / (1 - x))
        elif term == 'second':
          out.append(F * x * x / (1 - x))
        else:
          eps, delta = F - fhat, k - z0bar
          out.append((z0bar * (2 * eps * fhat + eps * eps) +
                      delta * (fhat + eps) ** 2) * np.exp(-s))
      return np.concatenate(out)
    return rhs

  def _integrate(self, F0, s0, s1, terms=(), fhat=None, z0bar=None,
                 t_eval=None):
    """Integrates F from s0 to s1 along with the quadratures of `terms`
    (accumulated from s0). Returns the solve_ivp result."""
    F0 = np.asarray(F0, dtype=complex)
    y0 = np.concatenate([F0] + [np.zeros_like(F0) for _ in terms])
    kappa = self.driving_function
    singular_tol = self.singular_tol

    def near_singularity(s, y):
      x = kappa(s) * np.exp(-s) * y[:len(F0)]
      return np.min(np.abs(1 - x)) - singular_tol
    near_singularity.terminal = True
    near_singularity.direction = -1

    options = {}
    if self.first_step is not None:
      options['first_step'] = self.first_step
    sol = solve_ivp(self._rhs(terms, fhat, z0bar), (s0, s1), y0,
                    method=self.method, rtol=self.rtol, atol=self.atol,
                    max_step=self.max_step, events=near_singularity,
                    t_eval=t_eval, **options)
    if sol.status == 1:
      s = sol.t_events[0][0]
      gap = near_singularity(s, sol.y_events[0][0]) + singular_tol
      raise SingularityApproach(s, gap)
    if sol.status != 0:
      raise SchlichtError('Loewner integration failed: {}'.format(sol.message))
    return sol

  def _check_time(self, t, name='t'):
    check_scalar(t, name, numbers.Real, min_val=0)
    if t > self.horizon:
      raise HorizonExceeded('{}={} exceeds the horizon {}.'
                            .format(name, t, self.horizon))
    return float(t)

  def solve(self, z, t):
    """``f(z, t)``; see :func:`ode_solve`."""
    points, scalar = check_points(z, bound=self.domain_radius, closed=True)
    t = self._check_time(t)
    if t == 0 or points.size == 0:
      return unwrap_scalar(points.copy(), scalar)
    F = self._integrate(points, 0., t).y[:, -1]
    return unwrap_scalar(np.exp(-t) * F, scalar)

  def trajectory(self, z, times):
    """``f(z, s)`` at every s of the increasing sequence `times`, shape
    ``(len(times), n_points)``."""
    points, _ = check_points(z, bound=self.domain_radius, closed=True)
    times = np.asarray(times, dtype=float).ravel()
    if np.any(np.diff(times) <= 0) or times[0] < 0:
      raise ValueError('times must be nonnegative and increasing.')
    self._check_time(times[-1], 'times[-1]')
    if times[-1] == 0:
      return points[None, :].copy()
    sol = self._integrate(points, 0., times[-1], t_eval=times)
    return (np.exp(-sol.t)[:, None] * sol.y.T)

  def limit(self, z, T=20.):
    """``e^T f(z, T)``, which tends to the limit map as T grows."""
    points, scalar = check_points(z)
    if points.size == 0:
      return points
    return unwrap_scalar(self._integrate(points, 0., T).y[:, -1], scalar)

  def limit_map(self, T=20.):
    return MapSpec.chain_limit(self, T)

  def tail_terms(self, z, t, T_max=None, terms=('full',), fhat=None,
                 z0bar=None):
    """Quadratures over ``[t, T_max]`` of the integrands named in `terms`.

    Terms are ``'full'`` (``e^s f kappa f / (1 - kappa f)``), ``'second'``
    (``e^s f (kappa f)**2 / (1 - kappa f)``) and ``'remainder'`` (the part
    of ``kappa e^s f**2`` left once ``z0bar fhat**2 e^{-s}`` is removed,
    with ``fhat`` the limit map and ``z0bar`` the limit of kappa).

    Returns
    -------
    integrals : dict
      Term name to array of values at the points.

    tail_bound : float
      ``max |integrand(T_max)|``, a bound on the neglected tail of
      integrands decaying like ``e^{-s}``.
    """
    points, _ = check_points(z, bound=self.domain_radius, closed=True)
    t = self._check_time(t)
    T_max = t + TAIL_SPAN if T_max is None else float(T_max)
    if T_max < t + MIN_TAIL_SPAN:
      raise ValueError('T_max={} must be at least t + {}.'
                       .format(T_max, MIN_TAIL_SPAN))
    if 'remainder' in terms and (fhat is None or z0bar is None):
      raise ValueError('The remainder term needs fhat and z0bar.')
    fhat = None if fhat is None else np.asarray(fhat, dtype=complex)
    F_t = points if t == 0 else self._integrate(points, 0., t).y[:, -1]
    y = self._integrate(F_t, t, T_max, terms, fhat, z0bar).y[:, -1]
    m = len(points)
    integrals = {term: y[(i + 1) * m:(i + 2) * m]
                 for i, term in enumerate(terms)}
    end = self._rhs(terms, fhat, z0bar)(T_max, y)
    tail_bound = float(np.max(np.abs(end[m:]))) if terms and m else 0.
    return integrals, tail_bound


def ode_solve(chain, z, t):
  """``f(z, t)`` for the chain, by adaptive integration from ``f(z, 0) = z``.

  Parameters
  ----------
  chain : LoewnerChain

  z : complex or array-like
    Points with ``|z| <= chain.domain_radius``.

  t : float
    Time, at most ``chain.horizon``.

  Raises
  ------
  SingularityApproach
    If ``|1 - kappa f|`` drops below ``chain.singular_tol``.

  HorizonExceeded
    If `t` is beyond ``chain.horizon``.
  """
  return chain.solve(z, t)


def explicit_koebe_chain(z, t, tol=1e-10):
  """Closed-form chain for ``kappa = -1``: the root w in the disk of
  ``K(w) = e^{-t} K(z)``, ``K(w) = w / (1 - w)**2``.

  The two roots of ``c w**2 - (2c + 1) w + c = 0`` have product one; the
  one of smaller modulus is returned.

  Examples
  --------
  >>> abs(explicit_koebe_chain(0.5, np.log(2)) - (3 - 5 ** .5) / 2) < 1e-12
  True
  """
  points, scalar = check_points(z)
  check_scalar(t, 't', numbers.Real, min_val=0)
  if t == 0:
    return unwrap_scalar(points.copy(), scalar)
  c = np.exp(-t) * points / (1 - points) ** 2
  b = 2 * c + 1
  disc = np.sqrt(4 * c + 1)
  q = np.where(np.abs(b + disc) >= np.abs(b - disc), b + disc, b - disc)
  w = np.divide(2 * c, q, out=np.zeros_like(c), where=c != 0)
  if np.any(np.abs(np.abs(w) - 1) <= tol):
    raise RootSelectionAmbiguous('Both roots lie on the unit circle.')
  return unwrap_scalar(w, scalar)


def h_integrand(chain, z, s):
  """``-e^s f 2 kappa f / (1 - kappa f)``, the s-derivative of
  ``e^s f(z, s)``."""
  f = np.asarray(ode_solve(chain, z, s))
  k = chain.driving_function(s)
  value = -np.exp(s) * f * 2 * k * f / (1 - k * f)
  return complex(value) if value.ndim == 0 else value


def variational_integral(chain, z, t, T_max=None, tail_tol=1e-9,
                         return_tail=False):
  """Quadrature of ``int_t^T_max e^s f kappa f / (1 - kappa f) ds``.

  Parameters
  ----------
  chain : LoewnerChain

  z : complex or array-like

  t : float

  T_max : float or None
    Truncation, at least ``t + 20``; defaults to ``t + 25``.

  tail_tol : float, optional (default=1e-9)
    Largest admissible bound on the neglected tail.

  return_tail : bool, optional (default=False)
    Whether to return the tail bound as well.

  Raises
  ------
  TailBoundLoose
    If the tail bound exceeds `tail_tol`.
  """
  points, scalar = check_points(z, bound=chain.domain_radius, closed=True)
  integrals, tail = chain.tail_terms(points, t, T_max)
  if tail > tail_tol:
    raise TailBoundLoose(tail, tail_tol)
  value = unwrap_scalar(integrals['full'], scalar)
  return (value, tail) if return_tail else value


class SupportPointData(object):
  """A slit map with the preimage `z0` of the tip of its slit.

  Parameters
  ----------
  map : MapSpec

  z0 : complex
    Unimodular preimage of the tip.

  w0 : complex or None
    Tip value; defaults to the radial limit of the map at `z0`.

  tol : float, optional (default=1e-5)
    Tolerance of the boundary-limit checks (``f'`` nearly zero and ``f``
    nearly `w0` at ``(1 - 1e-6) z0``).
  """

  def __init__(self, map, z0, w0=None, tol=1e-5):
    z0 = complex(z0)
    if abs(abs(z0) - 1) > 1e-12:
      raise ValueError('z0 must be unimodular, got |z0| = {}.'.format(abs(z0)))
    near = (1 - 1e-6) * z0
    slope = abs(complex(map.derivative(near)))
    if slope > tol:
      raise ValueError("|f'| = {:.3g} near z0 = {!r}; z0 is not the preimage "
                       "of a slit tip.".format(slope, z0))
    limit = complex(map(near))
    if w0 is None:
      w0 = limit
    elif abs(complex(w0) - limit) > tol * max(1, abs(limit)):
      raise ValueError('w0 = {!r} is not the boundary value {!r}.'
                       .format(w0, limit))
    self.map = map
    self.z0 = z0
    self.w0 = complex(w0)

  @classmethod
  def rotated_koebe(cls, angle=0.):
    """``e^{-i angle} K(e^{i angle} z)``, tip preimage ``-e^{-i angle}``."""
    f = MapSpec.koebe() if angle == 0 else MapSpec.rotated_koebe(angle)
    return cls(f, -np.exp(-1j * angle), -np.exp(-1j * angle) / 4)

  def chain(self, **params):
    """The constant chain ``kappa = conj(z0)`` tending to this map when it is
    a rotated Koebe map."""
    return LoewnerChain(driving=DrivingFunction.constant(np.conj(self.z0)),
                        **params)

  def to_dict(self):
    return {'map': self.map.to_dict(), 'z0': self.z0, 'w0': self.w0}


class TailDecomposition(object):
  """Terms of the decomposition of ``L`` applied to the variational
  integral at time t.

  Attributes
  ----------
  t : float

  leading : complex
    ``L(conj(z0) f**2 e^{-t})``.

  second_order : complex
    ``L`` of the tail integral of ``e^s f (kappa f)**2 / (1 - kappa f)``.

  remainder : complex
    ``full - leading - second_order``.

  full : complex
    ``L`` of the variational integral.

  truncation : float
    Upper integration limit used.

  tail_bound : float

  closure_residual : float
    Mismatch between ``full`` and the sum of the three terms with the
    remainder integrated directly from its integrand.

  remainder_direct : complex
  """

  def __init__(self, t, leading, second_order, remainder, full, truncation,
               tail_bound, closure_residual, remainder_direct, functional):
    self.t = t
    self.leading = leading
    self.second_order = second_order
    self.remainder = remainder
    self.full = full
    self.truncation = truncation
    self.tail_bound = tail_bound
    self.closure_residual = closure_residual
    self.remainder_direct = remainder_direct
    self.functional = functional

  @property
  def total(self):
    """Real part of the sum of the three terms."""
    return (self.leading + self.second_order + self.remainder).real

  def holds(self, tol=1e-6):
    return self.total <= tol

  def to_dict(self):
    return {'t': self.t, 'functional': self.functional,
            'leading': self.leading, 'second_order': self.second_order,
            'remainder': self.remainder, 'full': self.full,
            'total_real': self.total, 'truncation': self.truncation,
            'tail_bound': self.tail_bound,
            'closure_residual': self.closure_residual,
            'remainder_direct': self.remainder_direct}

  def __repr__(self):
    return ('TailDecomposition(t={}, leading={:.6g}, second_order={:.6g}, '
            'remainder={:.3g})').format(self.t, self.leading,
                                        self.second_order, self.remainder)


def theorem2_report(L, chain, support, t, T_max=None, radius=DEFAULT_RADIUS,
                    samples=DEFAULT_SAMPLES, tail_tol=1e-9):
  """Decomposes ``L`` of the variational integral of a support point.

  With ``fhat = support.map`` and ``z0bar = conj(support.z0)``, computes
  ``L(z0bar fhat**2 e^{-t})``, ``L`` of the second-order tail integral and
  the remainder (by subtraction from the full integral). The remainder is
  integrated a second time from its own integrand to measure how well the
  three terms close.

  Parameters
  ----------
  L : LinearFunctional

  chain : LoewnerChain
    Its driving function must tend to ``conj(support.z0)``.

  support : SupportPointData

  t : float

  Returns
  -------
  report : TailDecomposition
  """
  z0bar = np.conj(support.z0)
  if abs(chain.driving_function.limit - z0bar) > 1e-10:
    raise ValueError('The chain tends to {!r}, not to conj(z0) = {!r}.'
                     .format(chain.driving_function.limit, z0bar))
  T = t + TAIL_SPAN if T_max is None else float(T_max)
  z = L.sample_points(radius, samples)
  fhat = np.asarray(support.map(z), dtype=complex)
  integrals, tail = chain.tail_terms(z, t, T, ('full', 'second', 'remainder'),
                                     fhat=fhat, z0bar=z0bar)
  if tail > tail_tol:
    raise TailBoundLoose(tail, tail_tol)

  def apply(values):
    return L.from_samples(values, radius, samples)

  full = apply(integrals['full'])
  second = apply(integrals['second'])
  leading = apply(z0bar * fhat ** 2 * np.exp(-t))
  remainder = full - leading - second
  direct = apply(integrals['remainder'])
  leading_truncated = apply(z0bar * fhat ** 2 * (np.exp(-t) - np.exp(-T)))
  closure = abs(leading_truncated + second + direct - full)
  return TailDecomposition(float(t), leading, second, remainder, full, T,
                           tail, closure, direct, str(L))


def remainder_decay(reports, noise_floor=1e-9):
  """Ratios ``|remainder(t_{k+1})| / |remainder(t_k)|`` of consecutive
  reports; None where either remainder is below `noise_floor`."""
  ratios = []
  for before, after in zip(reports[:-1], reports[1:]):
    a, b = abs(before.remainder), abs(after.remainder)
    ratios.append(b / a if min(a, b) > noise_floor else None)
  return ratios


def remark1_check(radius=DEFAULT_RADIUS, samples=DEFAULT_SAMPLES):
  """Signs of ``Re L(conj(z0) f**2)`` for the coefficient of index 2 and the
  two Koebe maps ``z / (1 - z)**2`` (z0 = -1) and ``z / (1 + z)**2``
  (z0 = 1).

  Returns
  -------
  rows : list of dict
    One row per map with ``L(f**2)`` and ``Re L(conj(z0) f**2)``.
  """
  L = LinearFunctional.coefficient_index(2)
  rows = []
  for name, support in (('koebe', SupportPointData.rotated_koebe(0.)),
                        ('rotated_koebe_pi',
                         SupportPointData.rotated_koebe(np.pi))):
    f = support.map
    square = L(lambda z: f(z) ** 2, radius, samples)
    z0bar = np.conj(support.z0)
    signed = L(lambda z: z0bar * f(z) ** 2, radius, samples).real
    rows.append({'map': name, 'z0': support.z0, 'L(f^2)': square,
                 'Re L(conj(z0) f^2)': signed})
  return rows


def koebe_oracle_grid(chain=None, radii=None, n_angles=10,
                      times=(0.5, 1., 2., 5.)):
  """Compares :func:`ode_solve` with :func:`explicit_koebe_chain` on a polar
  grid; one row per (z, t)."""
  chain = LoewnerChain() if chain is None else chain
  radii = np.linspace(0.09, 0.9, 10) if radii is None else np.asarray(radii)
  angles = 2 * np.pi * np.arange(n_angles) / n_angles
  z = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
  rows = []
  for t in times:
    computed = ode_solve(chain, z, t)
    oracle = explicit_koebe_chain(z, t)
    for zk, ck, ok in zip(z, computed, oracle):
      rows.append({'z': zk, 't': float(t), 'ode': ck, 'oracle': ok,
                   'error': abs(ck - ok)})
  return rows

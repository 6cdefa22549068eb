"""
The :mod:`schlicht.exceptions` module includes all custom warnings and
error classes used across schlicht.
"""


class SchlichtError(Exception):
  """Base class of every error raised by a schlicht computation."""


class InvalidPair(SchlichtError, ValueError):

  def __init__(self, alpha, beta, reason):
    err_msg = ("Invalid omitted pair alpha={!r}, beta={!r}: {}."
               ).format(alpha, beta, reason)
    super(InvalidPair, self).__init__(err_msg)


class DegeneratePair(SchlichtError, ValueError):
  """theta - phi is too close to 0 or 2*pi: some coefficient would vanish."""


class PathHitsBranchPoint(SchlichtError, ValueError):

  def __init__(self, point, branch_point):
    err_msg = ("Continuation path passes through {!r}, within tolerance of "
               "the branch point {!r}.").format(point, branch_point)
    super(PathHitsBranchPoint, self).__init__(err_msg)


class AmbiguousContinuation(SchlichtError, ArithmeticError):

  def __init__(self, point):
    err_msg = ("Both square roots are equally close to the previous value "
               "at {!r}; refine the path.").format(point)
    super(AmbiguousContinuation, self).__init__(err_msg)


class DerivativeSingular(SchlichtError, ZeroDivisionError):
  pass


class OutsideDomain(SchlichtError, ValueError):

  def __init__(self, z, bound=1.):
    err_msg = ("Point(s) outside the admissible disk |z| < {}: max |z| = {!r}."
               ).format(bound, z)
    super(OutsideDomain, self).__init__(err_msg)


class DerivativeVanishesOnBoundary(SchlichtError, ValueError):

  def __init__(self, value, z):
    err_msg = ("|f'| = {:.3g} at z = {!r} on the unit circle; the map must "
               "have a nonvanishing derivative on the closed disk."
               ).format(value, z)
    super(DerivativeVanishesOnBoundary, self).__init__(err_msg)


class BranchPointCollision(SchlichtError, ArithmeticError):
  pass


class CapExceeded(SchlichtError, ValueError):
  pass


class NotOmitted(SchlichtError, ValueError):

  def __init__(self, value, z):
    err_msg = ("The map attains {!r} (up to tolerance) near z {}; it does "
               "not omit the pair.").format(value, z if isinstance(z, str) else
                                          "= {!r}".format(z))
    super(NotOmitted, self).__init__(err_msg)


class NonPositiveCoefficient(SchlichtError, ArithmeticError):
  pass


class PoleAtMidpoint(SchlichtError, ZeroDivisionError):

  def __init__(self, w):
    err_msg = ("2w equals alpha + beta at w = {!r}; the fixed point is at "
               "infinity.").format(w)
    super(PoleAtMidpoint, self).__init__(err_msg)


class SingularityApproach(SchlichtError, ArithmeticError):

  def __init__(self, s, gap):
    err_msg = ("|1 - kappa f| dropped to {:.3g} at s = {:.6g}."
               ).format(gap, s)
    super(SingularityApproach, self).__init__(err_msg)


class HorizonExceeded(SchlichtError, ValueError):
  pass


class RootSelectionAmbiguous(SchlichtError, ArithmeticError):
  pass


class TailBoundLoose(SchlichtError, ArithmeticError):

  def __init__(self, bound, tol):
    err_msg = ("Estimated tail {:.3g} beyond the truncation exceeds the "
               "requested tolerance {:.3g}; increase T_max.")
    err_msg = err_msg.format(bound, tol)
    super(TailBoundLoose, self).__init__(err_msg)


class DegenerateCurve(SchlichtError, ValueError):
  pass


class InconclusiveOnBoundary(SchlichtError, ArithmeticError):

  def __init__(self, value, angle):
    err_msg = ("|p'| = {:.3g} at angle {:.6g}: a zero of p' lies on (or "
               "too close to) the circle.").format(value, angle)
    super(InconclusiveOnBoundary, self).__init__(err_msg)


class ConstantFunctional(SchlichtError, ValueError):
  pass


class NoFeasibleStart(SchlichtError, RuntimeError):
  pass


class NotAZero(SchlichtError, ValueError):

  def __init__(self, value, angle, tol):
    err_msg = ("|p'(e^(i*{:.6g}))| = {:.3g} is not below the zero tolerance "
               "{:.3g}.").format(angle, value, tol)
    super(NotAZero, self).__init__(err_msg)


class ConfigError(SchlichtError, ValueError):

  def __init__(self, source, reason):
    err_msg = "Invalid configuration from {}: {}".format(source, reason)
    super(ConfigError, self).__init__(err_msg)


class InvariantWarning(UserWarning):
  """A decomposition tree node violates the equal-distance or real-range
  invariant; results are still returned."""

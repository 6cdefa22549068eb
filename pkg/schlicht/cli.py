"""
Command-line front end: one subcommand per computation, a JSON run report
on stdout (or ``--output``) and optional CSV tables.

Exit codes: 0 every check passed, 1 a check failed, 2 usage or
configuration error, 3 numerical error, 4 constant functional.
"""
import argparse
import csv
import io
import json
import logging
import numbers
import os
import sys
import time

import numpy as np
from numpy.polynomial import Polynomial
from threadpoolctl import threadpool_limits

from ._util import format_complex, parse_complex, to_jsonable
from ._version import __version__
from .analytic import LinearFunctional, MapSpec, OmittedPair, \
    perturbation_radius
from .decomposition import (SignWord, branch_fixed_point_residual, decompose,
                            fixed_point, rationalized_fixed_point,
                            verify_disjointness, verify_fixed_point,
                            verify_partition, verify_reconstruction)
from .exceptions import (ConfigError, ConstantFunctional, InvalidPair,
                         SchlichtError)
from .loewner import (SupportPointData, koebe_oracle_grid, remainder_decay,
                      remark1_check, theorem2_report)
from .polyext import ExtremalSearch

logger = logging.getLogger(__name__)

CONFIG_ENV = 'SCHLICHT_CONFIG'
DEFAULTS_PATH = os.path.join(os.path.dirname(__file__), 'defaults.json')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_ERROR = 3
EXIT_CONSTANT = 4


def _read_json(path):
  try:
    with io.open(path, encoding='utf-8') as fp:
      values = json.load(fp)
  except (IOError, OSError, ValueError) as e:
    raise ConfigError(path, str(e))
  if not isinstance(values, dict):
    raise ConfigError(path, 'expected a JSON object.')
  return values


class RunConfig(object):
  """Merged run configuration: checked-in defaults, then the file named by
  ``$SCHLICHT_CONFIG``, then ``--config``, then command-line flags.

  Parameters
  ----------
  values : dict
    Complete configuration.

  sources : list of str
    Files the values were read from, in order of precedence.
  """

  def __init__(self, values, sources=()):
    self.values = dict(values)
    self.sources = list(sources)
    self._validate()

  @classmethod
  def load(cls, path=None, overrides=None, environ=None):
    environ = os.environ if environ is None else environ
    values = _read_json(DEFAULTS_PATH)
    sources = [DEFAULTS_PATH]
    for source in (environ.get(CONFIG_ENV), path):
      if not source:
        continue
      extra = _read_json(source)
      unknown = sorted(set(extra) - set(values))
      if unknown:
        raise ConfigError(source, 'unknown key(s) {}.'.format(unknown))
      values.update(extra)
      sources.append(source)
    values.update({k: v for k, v in (overrides or {}).items()
                   if v is not None})
    return cls(values, sources)

  def _validate(self):
    for key, value in self.values.items():
      if key.endswith('_tol') or key in ('step_fraction',
                                         'coefficient_radius'):
        if not isinstance(value, numbers.Real) or not value > 0:
          raise ConfigError(key, 'must be positive, got {!r}.'.format(value))
    for key in ('threads', 'n_path_points', 'omission_samples', 'n_radii',
                'n_angles', 'coefficient_samples', 'n_starts',
                'search_samples', 'certify_samples', 'trace_samples',
                'gridsize'):
      value = self.values[key]
      if isinstance(value, bool) or not isinstance(value, numbers.Integral) \
         or value < 1:
        raise ConfigError(key, 'must be a positive integer, got {!r}.'
                          .format(value))
    if not isinstance(self.values['seed'], numbers.Integral):
      raise ConfigError('seed', 'must be an integer.')
    if self.values['format'] not in ('json', 'csv'):
      raise ConfigError('format', "must be 'json' or 'csv'.")
    for key in ('times', 'ode_times'):
      times = self.values[key]
      if not isinstance(times, list) or not times or \
         any(not isinstance(t, numbers.Real) or t <= 0 for t in times):
        raise ConfigError(key, 'must be a non-empty list of positive times.')
    if self.values['coefficient_radius'] >= 1:
      raise ConfigError('coefficient_radius', 'must be below 1.')

  def __getitem__(self, key):
    return self.values[key]

  def to_dict(self):
    return dict(self.values)


class RunReport(object):
  """Output document of one run.

  Every check is stored as ``{value, tolerance, passed}``; a report passes
  when all of its checks do.
  """

  def __init__(self, subcommand, config):
    self.subcommand = subcommand
    self.config = config
    self.results = {}
    self.residuals = {}
    self.checks = {}
    self.table = []
    self.error = None
    self.duration_seconds = 0.

  def add_check(self, name, value, tolerance, passed=None):
    if passed is None:
      passed = value is not None and value <= tolerance
    self.checks[name] = {'value': value, 'tolerance': tolerance,
                         'passed': bool(passed)}
    logger.debug('check %s: %r (tolerance %r) %s', name, value, tolerance,
                 'passed' if passed else 'FAILED')

  @property
  def passed(self):
    return self.error is None and all(c['passed']
                                      for c in self.checks.values())

  def to_dict(self):
    out = {'subcommand': self.subcommand, 'version': __version__,
           'config': self.config.to_dict(), 'results': self.results,
           'residuals': self.residuals, 'checks': self.checks,
           'passed': self.passed, 'duration_seconds': self.duration_seconds}
    if self.error is not None:
      out['error'] = self.error
    return out

  def to_json(self):
    return json.dumps(to_jsonable(self.to_dict()), sort_keys=True, indent=2)

  def write_table(self, fp):
    """Writes the flat table as CSV, complex cells as ``a+bi``."""
    if not self.table:
      return
    header = list(self.table[0])
    writer = csv.DictWriter(fp, fieldnames=header, lineterminator='\n')
    writer.writeheader()
    for row in self.table:
      writer.writerow({k: _csv_cell(v) for k, v in row.items()})


def _csv_cell(value):
  if isinstance(value, (complex, np.complexfloating)):
    return format_complex(value)
  if isinstance(value, (float, np.floating)):
    return repr(float(value))
  if value is None:
    return ''
  return value


def _pair(args, config):
  return OmittedPair(args.alpha, args.beta, tol=config['branch_tol'])


def _sample_grid(config, radius=0.9):
  radii = np.linspace(radius / config['n_radii'], radius, config['n_radii'])
  angles = 2 * np.pi * np.arange(config['n_angles']) / config['n_angles']
  return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def cmd_decompose(args, report):
  """Convex decomposition of a catalog map with its reconstruction,
  partition and disjointness checks."""
  config = report.config
  pair = _pair(args, config)
  d = decompose(pair, args.map, args.n, n_path_points=config['n_path_points'],
                step_fraction=config['step_fraction'],
                omission_samples=config['omission_samples'],
                invariant_tol=config['invariant_tol'])
  z = _sample_grid(config)
  error = verify_reconstruction(d, z)
  partition = verify_partition(pair, args.n, z,
                               n_path_points=config['n_path_points'],
                               step_fraction=config['step_fraction'])
  separation = verify_disjointness(d, z)
  report.results.update({'pair': pair, 'map': args.map, 'n': args.n,
                         'coefficients': d.coefficients_,
                         'words': [str(node.word) for node in d.nodes_]})
  report.residuals.update({
      'reconstruction': error, 'partition': partition,
      'coefficient_sum': abs(np.sum(d.coefficients_) - 1),
      'min_leaf_separation': separation,
      'closed_form_derivative': d.closed_form_residual_})
  report.add_check('reconstruction', error, config['reconstruction_tol'])
  report.add_check('partition', partition, config['partition_tol'])
  report.add_check('coefficient_sum', abs(np.sum(d.coefficients_) - 1),
                   config['sum_tol'])
  report.add_check('coefficients_positive', float(np.min(d.coefficients_)),
                   0., passed=np.all(d.coefficients_ > 0))
  report.add_check('tree_invariants', len(d.invariant_violations_), 0)
  report.table = [{'index': j, 'word': str(node.word),
                   'coefficient': d.coefficients_[j],
                   'value_at_zero': node.value_at_zero,
                   'derivative_at_zero': node.derivative_at_zero}
                  for j, node in enumerate(d.nodes_)]


def cmd_fixedpoint(args, report):
  """Common fixed point of the recursion and its depth-2 sign patterns."""
  config = report.config
  pair = _pair(args, config)
  g = fixed_point(pair, args.w)
  residual = verify_fixed_point(pair, args.w)
  rows = []
  for word in SignWord.enumerate(1) + SignWord.enumerate(2):
    value = rationalized_fixed_point(pair, args.w, word)
    rows.append({'word': str(word), 'fixed_point': value,
                 'deviation': abs(value - g),
                 'branch_residual': branch_fixed_point_residual(
                     pair, args.w, word,
                     step_fraction=config['step_fraction'])})
  spread = max(row['deviation'] for row in rows)
  # one word per depth must be a fixed point of the unsquared recursion
  branch = max(min(row['branch_residual'] for row in rows
                   if len(row['word']) == depth) for depth in (1, 2))
  scale = 1 + abs(g) ** 2
  report.results.update({'pair': pair, 'w': args.w, 'fixed_point': g})
  report.residuals.update({'fixed_point': residual, 'sign_patterns': spread,
                           'branch_fixed_point': branch})
  report.add_check('fixed_point', residual, config['fixed_point_tol'] * scale)
  report.add_check('sign_patterns', spread,
                   config['fixed_point_tol'] * (1 + abs(g)))
  report.add_check('branch_fixed_point', branch,
                   config['fixed_point_tol'] * (1 + abs(g)))
  report.table = rows


def _koebe_support(config):
  support = SupportPointData.rotated_koebe(0.)
  return support, support.chain(method=config['ode_method'],
                                rtol=config['ode_rtol'],
                                atol=config['ode_atol'])


def cmd_verify_ode(args, report):
  """Adaptive integration of the chain against its closed form."""
  config = report.config
  _, chain = _koebe_support(config)
  rows = koebe_oracle_grid(chain, np.linspace(0.09, 0.9, config['n_radii']),
                           config['n_angles'], config['ode_times'])

  def koebe(w):
    return w / (1 - w) ** 2

  for row in rows:
    row['conservation'] = abs(np.exp(row['t']) * koebe(row['ode']) -
                              koebe(row['z']))
  error = max(row['error'] for row in rows)
  conservation = max(row['conservation'] / (1 + abs(koebe(row['z'])))
                     for row in rows)
  report.results.update({'n_points': len(rows), 'times': config['ode_times']})
  report.residuals.update({'max_error': error, 'conservation': conservation})
  report.add_check('oracle_agreement', error, config['ode_tol'])
  report.add_check('conservation', conservation, config['ode_tol'])
  report.table = rows


def cmd_theorem2(args, report):
  """Tail decomposition of the variational integral of the Koebe support
  point at every configured time."""
  config = report.config
  support, chain = _koebe_support(config)
  reports = [theorem2_report(args.functional, chain, support, t,
                             config['T_max'], config['coefficient_radius'],
                             config['coefficient_samples'],
                             config['tail_tol'])
             for t in config['times']]
  ratios = remainder_decay(reports)
  report.results.update({'functional': str(args.functional),
                         'support': support, 'terms': reports,
                         'remainder_decay': ratios})
  report.residuals.update({
      'closure': max(r.closure_residual for r in reports),
      'tail_bound': max(r.tail_bound for r in reports)})
  for r in reports:
    report.add_check('sum_t={:g}'.format(r.t), r.total,
                     config['theorem2_tol'])
    report.add_check('closure_t={:g}'.format(r.t), r.closure_residual,
                     config['closure_tol'])
  report.table = [dict(r.to_dict(), remainder_decay=ratio)
                  for r, ratio in zip(reports, [None] + ratios)]


def cmd_remark1(args, report):
  """Coefficient functional whose real part changes sign between the two
  Koebe support points."""
  config = report.config
  rows = remark1_check(config['coefficient_radius'],
                       config['coefficient_samples'])
  expected = {'koebe': -1., 'rotated_koebe_pi': 1.}
  tol = config['remark1_tol']
  for row in rows:
    report.add_check('L(f^2)[{}]'.format(row['map']),
                     abs(row['L(f^2)'] - 1), tol)
    report.add_check('Re L(conj(z0) f^2)[{}]'.format(row['map']),
                     abs(row['Re L(conj(z0) f^2)'] - expected[row['map']]),
                     tol)
  report.results['rows'] = rows
  report.table = rows


def cmd_extremal(args, report):
  """Maximizes a linear functional over univalent polynomials of degree at
  most n."""
  config = report.config
  search = ExtremalSearch(
      n_starts=config['n_starts'], search_samples=config['search_samples'],
      certify_samples=config['certify_samples'],
      objective=config['objective'], zero_tol=config['zero_tol'],
      simplicity_tol=config['simplicity_tol'], random_state=config['seed'])
  result = search.fit(args.functional, args.n).result_
  report.results.update({'result': result, 'n': args.n,
                         'n_iter': search.n_iter_})
  report.residuals.update({
      'boundary_derivative_min': result.boundary_derivative_min,
      'min_boundary_separation':
          result.certificate.min_boundary_separation})
  report.add_check('univalence_certificate', result.certificate.verdict,
                   'certified', passed=result.certificate.certified)
  report.add_check('boundary_zero', result.boundary_derivative_min,
                   config['zero_tol'])
  simplicity = min([abs(d) for d in result.second_derivative_at_zeros],
                   default=None)
  report.add_check('zero_simplicity', simplicity, config['simplicity_tol'],
                   passed=result.zero_angles and
                   result.simple_zeros(config['simplicity_tol']))
  report.table = result.trace(config['trace_samples'])


def _describe_map(f):
  if isinstance(f, Polynomial):
    return {'kind': 'poly', 'coefficients': f.coef}
  return f


def cmd_perturbation(args, report):
  """Radius of injectivity of ``f + w0 g`` on a polar grid."""
  config = report.config
  gridsize = args.gridsize or config['gridsize']
  g_prime = args.g.deriv() if isinstance(args.g, Polynomial) else None
  delta = perturbation_radius(args.f, args.g, gridsize, g_prime=g_prime)
  report.results.update({'f': args.f, 'g': _describe_map(args.g),
                         'gridsize': gridsize, 'radius': delta})
  report.add_check('positive_radius', delta, 0., passed=delta > 0)


def _argument_type(parse, what):
  def convert(text):
    try:
      return parse(text)
    except ValueError as e:
      raise argparse.ArgumentTypeError('invalid {}: {}'.format(what, e))
  convert.__name__ = what
  return convert


def _positive_int(text):
  value = int(text)
  if value < 1:
    raise ValueError('must be at least 1, got {}'.format(value))
  return value


def _perturbation_map(text):
  """``poly:<c0>,<c1>,...`` for an arbitrary polynomial, else a catalog
  map."""
  head, _, arg = text.strip().partition(':')
  if head == 'poly':
    if not arg:
      raise ValueError('poly: needs coefficients c0,c1,...')
    return Polynomial([parse_complex(c) for c in arg.split(',')])
  return MapSpec.from_name(text)


def _times(text):
  values = [float(t) for t in text.split(',') if t.strip()]
  if not values or min(values) <= 0:
    raise ValueError('expected positive comma-separated times')
  return values


complex_arg = _argument_type(parse_complex, 'complex literal')
map_arg = _argument_type(MapSpec.from_name, 'map')
perturbation_map_arg = _argument_type(_perturbation_map, 'map')
functional_arg = _argument_type(LinearFunctional.from_string, 'functional')
positive_int_arg = _argument_type(_positive_int, 'positive integer')
times_arg = _argument_type(_times, 'time list')


def build_parser():
  parser = argparse.ArgumentParser(
      prog='schlicht', allow_abbrev=False,
      description='Decompositions, Loewner chains and extremal polynomials '
                  'of univalent maps, with verification reports.')
  parser.add_argument('--version', action='version',
                      version='%(prog)s ' + __version__)
  parser.add_argument('--config', help='JSON file overriding the defaults.')
  parser.add_argument('--output', help='Write the JSON report here.')
  parser.add_argument('--format', choices=('json', 'csv'))
  parser.add_argument('--table', help='Write the CSV table here.')
  parser.add_argument('--threads', type=positive_int_arg,
                      help='Cap on BLAS/OpenMP threads.')
  parser.add_argument('--seed', type=int)
  parser.add_argument('-v', '--verbose', action='count', default=0)
  sub = parser.add_subparsers(dest='subcommand', metavar='SUBCOMMAND')
  sub.required = True

  def with_pair(p):
    p.add_argument('--alpha', type=complex_arg, required=True)
    p.add_argument('--beta', type=complex_arg, required=True)
    return p

  p = with_pair(sub.add_parser('decompose', help=cmd_decompose.__doc__))
  p.add_argument('--map', type=map_arg, default=MapSpec.identity())
  p.add_argument('-n', type=positive_int_arg, default=1)
  p.set_defaults(handler=cmd_decompose)

  p = with_pair(sub.add_parser('fixedpoint', help=cmd_fixedpoint.__doc__))
  p.add_argument('--w', type=complex_arg, required=True)
  p.set_defaults(handler=cmd_fixedpoint)

  loewner = sub.add_parser('loewner', help='Loewner chain computations.')
  tasks = loewner.add_subparsers(dest='task', metavar='TASK')
  tasks.required = True
  p = tasks.add_parser('verify-ode', help=cmd_verify_ode.__doc__)
  p.add_argument('--t', dest='ode_times', type=times_arg)
  p.set_defaults(handler=cmd_verify_ode)
  p = tasks.add_parser('theorem2', help=cmd_theorem2.__doc__)
  p.add_argument('--functional', type=functional_arg,
                 default=LinearFunctional.coefficient_index(2))
  p.add_argument('--t', dest='times', type=times_arg)
  p.add_argument('--T-max', dest='T_max', type=float)
  p.set_defaults(handler=cmd_theorem2)
  p = tasks.add_parser('remark1', help=cmd_remark1.__doc__)
  p.set_defaults(handler=cmd_remark1)

  p = sub.add_parser('extremal', help=cmd_extremal.__doc__)
  p.add_argument('--functional', type=functional_arg, required=True)
  p.add_argument('-n', type=positive_int_arg, required=True)
  p.add_argument('--n-starts', dest='n_starts', type=positive_int_arg)
  p.add_argument('--objective', choices=('modulus', 'real'))
  p.set_defaults(handler=cmd_extremal)

  p = sub.add_parser('perturbation', help=cmd_perturbation.__doc__)
  p.add_argument('--f', type=map_arg, default=MapSpec.identity())
  p.add_argument('--g', type=perturbation_map_arg, required=True,
                 help='Catalog map or poly:<c0>,<c1>,...')
  p.add_argument('--gridsize', type=positive_int_arg)
  p.set_defaults(handler=cmd_perturbation)
  return parser


_OVERRIDES = ('seed', 'threads', 'format', 'output', 'table', 'ode_times',
              'times', 'T_max', 'n_starts', 'objective')


def _subcommand_name(args):
  task = getattr(args, 'task', None)
  return args.subcommand + (' ' + task if task else '')


def _emit(report):
  """Writes the JSON document to ``--output`` or stdout and the table to
  ``--table``. With ``--format csv`` and no table file the table takes
  stdout and the document, unless written to ``--output``, goes to
  stderr."""
  config = report.config
  document = report.to_json() + '\n'
  table_to_stdout = config['format'] == 'csv' and not config['table']
  if config['output']:
    with io.open(config['output'], 'w', encoding='utf-8') as fp:
      fp.write(document)
  elif table_to_stdout:
    sys.stderr.write(document)
  else:
    sys.stdout.write(document)
  if config['table']:
    with io.open(config['table'], 'w', encoding='utf-8', newline='') as fp:
      report.write_table(fp)
  elif table_to_stdout:
    report.write_table(sys.stdout)


def run(args):
  """Runs the parsed command line; returns ``(report, exit_code)``."""
  overrides = {key: getattr(args, key, None) for key in _OVERRIDES}
  config = RunConfig.load(args.config, overrides)
  report = RunReport(_subcommand_name(args), config)
  start = time.time()
  code = EXIT_OK
  try:
    with threadpool_limits(limits=config['threads']):
      args.handler(args, report)
  except ConstantFunctional as e:
    report.error, code = {'type': type(e).__name__, 'message': str(e)}, \
        EXIT_CONSTANT
  except InvalidPair as e:
    report.error, code = {'type': type(e).__name__, 'message': str(e)}, \
        EXIT_USAGE
  except SchlichtError as e:
    report.error, code = {'type': type(e).__name__, 'message': str(e)}, \
        EXIT_ERROR
  except ValueError as e:
    # parameter errors the argument parser cannot see
    report.error, code = {'type': type(e).__name__, 'message': str(e)}, \
        EXIT_USAGE
  report.duration_seconds = time.time() - start
  if report.error is not None:
    logger.error('%s: %s', report.error['type'], report.error['message'])
  elif not report.passed:
    code = EXIT_FAILED
    logger.warning('failed checks: %s', ', '.join(
        name for name, c in sorted(report.checks.items())
        if not c['passed']))
  return report, code


def main(argv=None):
  parser = build_parser()
  args = parser.parse_args(argv)
  logging.basicConfig(
      level=logging.DEBUG if args.verbose else logging.WARNING,
      format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
  try:
    report, code = run(args)
  except ConfigError as e:
    logger.error('%s', e)
    return EXIT_USAGE
  _emit(report)
  return code


if __name__ == '__main__':
  sys.exit(main())

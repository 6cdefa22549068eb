from schlicht import LinearFunctional, LoewnerChain, SupportPointData
from schlicht.loewner import koebe_oracle_grid, theorem2_report


class KoebeChain(object):
  params = [['DOP853', 'RK45']]
  param_names = ['method']

  def time_oracle_grid(self, method):
    koebe_oracle_grid(LoewnerChain(method=method))

  def track_max_error(self, method):
    rows = koebe_oracle_grid(LoewnerChain(method=method))
    return max(row['error'] for row in rows)


class TailDecomposition(object):
  params = [['a2', 'a3']]
  param_names = ['functional']

  def setup(self, functional):
    self.support = SupportPointData.rotated_koebe(0.)
    self.L = LinearFunctional.from_string(functional)

  def time_report(self, functional):
    theorem2_report(self.L, self.support.chain(), self.support, 2.)

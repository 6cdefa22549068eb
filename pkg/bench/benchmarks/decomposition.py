import numpy as np

from schlicht import OmittedPair, MapSpec, decompose, verify_reconstruction

PAIRS = {
    'real': OmittedPair(2, -2),
    'quarter': OmittedPair(1, 1j),
}


class Decomposition(object):
  params = [sorted(PAIRS), [2, 4, 6]]
  param_names = ['pair', 'n']

  def setup(self, pair, n):
    radii = np.linspace(0.09, 0.9, 10)
    angles = 2 * np.pi * np.arange(10) / 10
    self.points = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()

  def time_decompose(self, pair, n):
    decompose(PAIRS[pair], MapSpec.identity(), n)

  def track_reconstruction_error(self, pair, n):
    d = decompose(PAIRS[pair], MapSpec.identity(), n)
    return verify_reconstruction(d, self.points)

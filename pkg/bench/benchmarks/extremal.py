from schlicht import LinearFunctional, ExtremalSearch, PolynomialCandidate
from schlicht import is_univalent


class Certificate(object):
  params = [[512, 4096, 16384]]
  param_names = ['M']

  def time_is_univalent(self, M):
    is_univalent(PolynomialCandidate([0.2, -0.1j, 0.05]), M)


class Search(object):
  params = [[2, 3]]
  param_names = ['n']

  def time_fit(self, n):
    ExtremalSearch(n_starts=4).fit(LinearFunctional.coefficient_index(n), n)

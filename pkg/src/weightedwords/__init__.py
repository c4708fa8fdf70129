"""Exact q-series tools for weighted-words partition identities.

Subpackages and modules:

* ``qseries``: truncated multivariate q-series, Pochhammer symbols and
  Gaussian binomials.
* ``colored``: transition-matrix colored partitions and their bounded
  generating functions.
* ``partitions``: enumerators and censuses for the classical families.
* ``identities``: the h-sequences, the finite sums and the identity registry.
* ``dsl``: the relation language the registry is written in.
"""

__version__ = "0.1.0"

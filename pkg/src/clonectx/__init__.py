"""Workbench for the contextuality analysis of state-dependent quantum cloning.

Subpackages by concern:

* :mod:`clonectx.bounds`  -- closed-form fidelities, noncontextual ceilings
  and depolarizing-noise error budgets.
* :mod:`clonectx.quantum` -- finite-dimensional simulation of the noisy
  cloning experiment (states, channels, Born rule, clone optimizer).
* :mod:`clonectx.ontic`   -- discretized ontological models on a cell grid,
  with operational-equivalence checkers and the bound-saturating model.
* :mod:`clonectx.scan`    -- parameter sweeps, violation intervals and
  figure-data emission.
* :mod:`clonectx.cli`     -- command-line front end.
"""

__version__ = "0.1.0"

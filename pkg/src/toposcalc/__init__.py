"""Finite-site topos computations and finite-model back-and-forth.

Modules: ``fincat`` (finite categories), ``sitecore`` (sieves and
Grothendieck topologies), ``sheafkit`` (presheaves, sheafification,
subobject lattices, atoms), ``modelkit`` (structures, geometric formulas,
isomorphism), ``gsets`` (permutation groups and their actions), ``cli``.
"""

__version__ = "0.1.0"

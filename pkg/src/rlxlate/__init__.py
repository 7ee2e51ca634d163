"""Exact-arithmetic toolkit for checking translations between RL frameworks.

Everything value-like is a `fractions.Fraction`; floats appear only in the
Monte-Carlo cross-checks.  The package is organised as:

    core          universes, histories, distributions, framework specs
    policies      agents/environments, constructed environments, corpora
    valuation     exact expected values, simulation, equivalence probes
    translations  the translation catalog and its law checkers
    audit         falsification machinery for the impossibility arguments
    elections     comparator (ultrafilter-style) preservation checks
    cli           command-line front end and experiment configs
"""

__version__ = "0.1.0"

from . import core, policies, valuation, translations, audit, elections  # noqa: F401

"""Translation lengths, Cartan projections and stretch factors for group actions on trees."""

__version__ = "0.1.0"

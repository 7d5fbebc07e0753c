"""Random network models, exact s-T min cuts and concentration bounds."""

__version__ = "0.1.0"

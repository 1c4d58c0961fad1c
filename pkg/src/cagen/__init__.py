"""cagen - covering array test-suite generator (SCA / Q-learning SCA)."""

__version__ = "0.1.0"
__author__ = "cagen Team"

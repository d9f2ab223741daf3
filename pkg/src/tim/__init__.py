"""Transit incident mining from operator social-media posts."""

__version__ = "0.1.0"

from .errors import LefkitError  # noqa: F401

__version__ = "0.1.0"

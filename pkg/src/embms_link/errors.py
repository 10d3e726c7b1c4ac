"""Exception types shared across the simulator."""


class LinkSimError(Exception):
    """Base class for all embms_link errors."""


class ConfigError(LinkSimError):
    """Invalid configuration or parameter combination (CLI exit code 1)."""


class DataFileError(LinkSimError):
    """Missing or malformed bundled data file (CLI exit code 2)."""

"""Exception types shared across the package."""


class HushlabError(Exception):
    """Base class for all package errors."""


class WavFormatError(HushlabError):
    """RIFF/WAVE container is malformed or truncated."""


class UnsupportedWavError(HushlabError):
    """WAV codec or sample format the reader does not handle."""


class ConfigError(HushlabError):
    """Run configuration is invalid (unknown keys, bad values, bad paths)."""


class PoolError(HushlabError):
    """Clip pools cannot satisfy a dataset recipe (too small, wrong lengths)."""

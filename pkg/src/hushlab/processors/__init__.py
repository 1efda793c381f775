"""Streaming audio processors and their parameter types."""

from __future__ import annotations

import dataclasses

from hushlab.audio import DEFAULT_RATE, AudioBuffer
from hushlab.errors import ConfigError
from hushlab.processors.agc import Agc, AgcParams, agc_process
from hushlab.processors.base import (
    IdentityProcessor,
    StreamProcessor,
    ZeroProcessor,
    apply_processor,
    smoothing_coeff,
)
from hushlab.processors.drc import Drc, DrcParams, drc_process, static_gain_curve
from hushlab.processors.eq import DEFAULT_EQ_BANDS, Eq, EqBand, EqParams, eq_process
from hushlab.processors.lpf import Lpf, LpfParams, lpf_process
from hushlab.processors.mctr import Mctr, MctrParams, mctr_process

_REGISTRY = {
    "identity": (IdentityProcessor, None),
    "none": (IdentityProcessor, None),  # alias; "st_none" = ANC-only stimulus
    "drc": (Drc, DrcParams),
    "eq": (Eq, EqParams),
    "agc": (Agc, AgcParams),
    "mctr": (Mctr, MctrParams),
    "lpf": (Lpf, LpfParams),
}

#: The five enhancement algorithms plus the identity pass-through.
ALGORITHMS = ("identity", "drc", "eq", "agc", "mctr", "lpf")


def _params_from_dict(cls, config: dict):
    if cls is EqParams:
        config = dict(config)
        if "bands" in config:
            bands = []
            for i, b in enumerate(config["bands"]):
                extra = set(b) - {"type", "corner_hz", "gain_db"}
                if extra:
                    raise ConfigError(f"eq band {i}: unknown keys {sorted(extra)}")
                try:
                    bands.append(EqBand(b["type"], b["corner_hz"], b["gain_db"]))
                except KeyError as exc:
                    raise ConfigError(f"eq band {i}: missing key {exc}") from None
            config["bands"] = tuple(bands)
    known = {f.name for f in dataclasses.fields(cls)}
    extra = set(config) - known
    if extra:
        raise ConfigError(f"unknown parameter keys {sorted(extra)} for {cls.__name__}")
    try:
        return cls(**config)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def make_processor(name: str, config: dict | None = None,
                   fs: int = DEFAULT_RATE) -> StreamProcessor:
    """Build a processor by algorithm name.

    Parameters
    ----------
    name : str
        One of ``ALGORITHMS``: "none", "drc", "eq", "agc", "mctr", "lpf".
    config : dict, optional
        Parameter overrides using the dataclass field names.  Omitted
        fields keep their defaults.  Unknown keys raise ``ConfigError``.
    fs : int
        Sample rate the processor will run at.

    Returns
    -------
    StreamProcessor
    """
    if name not in _REGISTRY:
        raise ConfigError(
            f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}"
        )
    proc_cls, params_cls = _REGISTRY[name]
    if params_cls is None:
        if config:
            raise ConfigError(f"algorithm {name!r} takes no parameters")
        return proc_cls()
    params = _params_from_dict(params_cls, dict(config or {}))
    return proc_cls(params, fs=fs)


def process_buffer(name: str, x: AudioBuffer, config: dict | None = None) -> AudioBuffer:
    """One-shot convenience: build a processor and run it over a whole buffer."""
    return apply_processor(make_processor(name, config, fs=x.sample_rate_hz), x)


__all__ = [
    "ALGORITHMS",
    "Agc", "AgcParams", "agc_process",
    "DEFAULT_EQ_BANDS",
    "Drc", "DrcParams", "drc_process", "static_gain_curve",
    "Eq", "EqBand", "EqParams", "eq_process",
    "IdentityProcessor", "ZeroProcessor",
    "Lpf", "LpfParams", "lpf_process",
    "Mctr", "MctrParams", "mctr_process",
    "StreamProcessor", "apply_processor", "smoothing_coeff",
    "make_processor", "process_buffer",
]

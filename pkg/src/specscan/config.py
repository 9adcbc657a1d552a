# coding: utf-8
"""
Experiment configuration.

A configuration file is flat UTF-8 text with one ``key = value`` pair per
line, dotted section prefixes and ``#`` comments::

    run.mode = scan
    scan.lambda = 100
    measurement.sigma = 1e-3

Every key has a type and a default in `SCHEMA`; missing keys take their
default, unknown keys and unparsable values raise `ConfigError`.
"""
from collections import namedtuple
from collections.abc import Mapping
from logging import getLogger
from math import pi

from ._utils import require_unit_interval
from .clustered import ClusterModel
from .scan import AUTO, ScanConfig
from .subspace import MusicConfig
from .windowing import regions

log = getLogger(__name__)

MODES = ("synth", "music", "scan", "scanc", "detect", "bench", "check")
SOURCES = ("random", "clustered", "inline", "file")
NOISE_KINDS = ("disk", "clipped-gaussian")
BENCH_KINDS = ("range", "noise", "clusters")
NONE = "none"

UNKNOWN_KEY = "Unknown config key {key}."
BAD_VALUE = "Invalid value {value!r} for {key}: {reason}"
BAD_LINE = "Line {line}: expected 'key = value', got {text!r}."
DUPLICATE_KEY = "Line {line}: key {key} given twice."
OVERRIDDEN = "Config key %s overridden with %r."


class ConfigError(ValueError):
    """
    Invalid configuration; the message names the offending key.
    """
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


Key = namedtuple("Key", "default parse format")


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError("expected true or false")


def _format_bool(value):
    return "true" if value else "false"


def _format_float(value):
    return repr(float(value))


def _parse_positive_int(text):
    value = int(text)
    if value < 1:
        raise ValueError("expected a positive integer")
    return value


def _parse_nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise ValueError("expected a nonnegative integer")
    return value


def _parse_positive_float(text):
    value = float(text)
    if not value > 0:
        raise ValueError("expected a positive number")
    return value


def _parse_nonnegative_float(text):
    value = float(text)
    if not value >= 0:
        raise ValueError("expected a nonnegative number")
    return value


def _choice(options):
    def parse(text):
        text = text.strip()
        if text not in options:
            raise ValueError("expected one of {}".format(", ".join(options)))
        return text
    return parse


def _optional(parse):
    def parse_optional(text):
        if text.strip().lower() == NONE:
            return None
        return parse(text)
    return parse_optional


def _format_optional(fmt):
    def format_optional(value):
        return NONE if value is None else fmt(value)
    return format_optional


def _or_auto(parse):
    def parse_or_auto(text):
        if text.strip().lower() == AUTO:
            return AUTO
        return parse(text)
    return parse_or_auto


def _format_or_auto(fmt):
    def format_or_auto(value):
        return AUTO if value == AUTO else fmt(value)
    return format_or_auto


def _list_of(parse):
    def parse_list(text):
        text = text.strip()
        if not text:
            return ()
        return tuple(parse(item) for item in text.split(","))
    return parse_list


def _format_list(fmt):
    def format_list(values):
        return ", ".join(fmt(value) for value in values)
    return format_list


def _parse_interval(text):
    low, high = (float(item) for item in text.split(","))
    if not low < high:
        raise ValueError("expected low < high")
    return (low, high)


def _format_interval(value):
    return "{}, {}".format(_format_float(value[0]), _format_float(value[1]))


def _str(text):
    return text.strip()


_BOOL = (_parse_bool, _format_bool)
_STR = (_str, str)
_PINT = (_parse_positive_int, str)
_PFLOAT = (_parse_positive_float, _format_float)
_OPT_PFLOAT = (
    _optional(_parse_positive_float), _format_optional(_format_float)
)
_OPT_PINT = (_optional(_parse_positive_int), _format_optional(str))
_OPT_INTERVAL = (
    _optional(_parse_interval), _format_optional(_format_interval)
)
_FLOATS = (_list_of(float), _format_list(_format_float))
_PFLOATS = (_list_of(_parse_positive_float), _format_list(_format_float))
_PINTS = (_list_of(_parse_positive_int), _format_list(str))


def _key(default, kind):
    return Key(default, kind[0], kind[1])


def _choice_key(default, options):
    return Key(default, _choice(options), str)


SCHEMA = {
    "run.mode": _choice_key("scan", MODES),
    "run.seed": Key(0, _parse_nonnegative_int, str),
    "run.repetitions": _key(1, _PINT),
    "run.output": _key("specscan-out", _STR),
    "run.archive": _key(False, _BOOL),
    "spectrum.source": _choice_key("random", SOURCES),
    "spectrum.positions": _key((), _FLOATS),
    "spectrum.amplitudes": _key((), _FLOATS),
    "spectrum.file": _key("", _STR),
    "spectrum.radius": _key(100.0, _PFLOAT),
    "spectrum.min_separation": _key(5.0, _PFLOAT),
    "spectrum.max_separation": _key(10.0, _PFLOAT),
    "spectrum.clusters": _key(10, _PINT),
    "spectrum.cluster_size": _key(2, _PINT),
    "spectrum.cluster_gap": _key(4 * pi, _PFLOAT),
    "spectrum.intra_separation": _key(1.0, _PFLOAT),
    "measurement.omega": _key(1.0, _PFLOAT),
    "measurement.step": Key(
        AUTO, _or_auto(_parse_positive_float), _format_or_auto(_format_float)
    ),
    "measurement.sigma": Key(
        1e-3, _parse_nonnegative_float, _format_float
    ),
    "measurement.tau": _key(1.0, _PFLOAT),
    "measurement.noise": _choice_key("disk", NOISE_KINDS),
    "scan.lambda": _key(100.0, _PFLOAT),
    "scan.gamma": _key(1e-3, _PFLOAT),
    "scan.trust_level": _key(0.95, _PFLOAT),
    "scan.essential_level": _key(1e-3, _PFLOAT),
    "scan.sweep": _key(None, _OPT_INTERVAL),
    "scan.subsample_factor": Key(
        AUTO, _or_auto(_parse_positive_int), _format_or_auto(str)
    ),
    "scan.density_prior": _key(None, _OPT_PFLOAT),
    "scan.merge_radius": _key(None, _OPT_PFLOAT),
    "scan.detection_lambda": _key(None, _OPT_PFLOAT),
    "music.source_count": _key(None, _OPT_PINT),
    "music.sv_ratio_threshold": _key(None, _OPT_PFLOAT),
    "music.grid_density": _key(100, _PINT),
    "music.peak_floor": _key(0.5, _PFLOAT),
    "music.search_interval": _key(None, _OPT_INTERVAL),
    "clusters.near_order": _key(None, _OPT_PINT),
    "clusters.far_order": _key(None, _OPT_PINT),
    "clusters.max_count": _key(None, _OPT_PINT),
    "clusters.detect": _key(False, _BOOL),
    "bench.kind": _choice_key("range", BENCH_KINDS),
    "bench.radii": _key((200.0, 400.0, 800.0), _PFLOATS),
    "bench.sigmas": _key((1e-1, 1e-2, 1e-3), _PFLOATS),
    "bench.counts": _key((40, 80, 160, 320), _PINTS),
    "bench.step_scale": _key(3.0, _PFLOAT),
}


def parse_value(key, text):
    """
    Parse the text of one value, raising `ConfigError` naming `key`.
    """
    if key not in SCHEMA:
        raise ConfigError(UNKNOWN_KEY.format(key=key), key)
    try:
        return SCHEMA[key].parse(text)
    except (ValueError, TypeError) as exc:
        # pylint: disable=raise-missing-from
        raise ConfigError(
            BAD_VALUE.format(key=key, value=text, reason=exc), key
        )


class ExperimentConfig(Mapping):
    """
    Immutable mapping from every schema key to its value.

    Parameters
    ----------
    values : mapping, optional
        values overriding the defaults; strings are parsed, other values are
        checked by formatting and re-parsing them
    """
    def __init__(self, values=None):
        self._values = {key: spec.default for key, spec in SCHEMA.items()}
        for key, value in (values or {}).items():
            self._values[key] = _coerce(key, value)

    def __getitem__(self, key):
        return self._values[key]

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        changed = {
            key: value for key, value in self._values.items()
            if value != SCHEMA[key].default
        }
        return "ExperimentConfig({!r})".format(changed)

    def replace(self, **overrides):
        """
        Return a copy with some keys replaced; keyword names use ``__`` for
        the dot, as in ``replace(run__seed=3)``.
        """
        values = dict(self._values)
        for name, value in overrides.items():
            key = name.replace("__", ".")
            values[key] = value
            log.debug(OVERRIDDEN, key, value)
        return ExperimentConfig(values)

    @property
    def mode(self):
        """str: the subcommand run by `specscan.harness.run`"""
        return self._values["run.mode"]


def _coerce(key, value):
    if key not in SCHEMA:
        raise ConfigError(UNKNOWN_KEY.format(key=key), key)
    if isinstance(value, str):
        return parse_value(key, value)
    spec = SCHEMA[key]
    try:
        text = spec.format(value)
    except (ValueError, TypeError) as exc:
        # pylint: disable=raise-missing-from
        raise ConfigError(
            BAD_VALUE.format(key=key, value=value, reason=exc), key
        )
    return parse_value(key, text)


def parse_config(text):
    """
    Parse configuration text into an `ExperimentConfig`.
    """
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(BAD_LINE.format(line=number, text=raw))
        if key in values:
            raise ConfigError(DUPLICATE_KEY.format(line=number, key=key), key)
        values[key] = parse_value(key, value)
    return ExperimentConfig(values)


def serialize_config(config):
    """
    Render every key of `config` in sorted order; `parse_config` reads the
    result back into an equal configuration.
    """
    return "".join(
        "{} = {}\n".format(key, SCHEMA[key].format(config[key]))
        for key in sorted(SCHEMA)
    )


def load_config(path):
    """
    Read the configuration file at `path`.
    """
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())


def music_config(config):
    """
    `MusicConfig` described by the ``music.*`` keys.
    """
    return MusicConfig(
        source_count=config["music.source_count"],
        sv_ratio_threshold=config["music.sv_ratio_threshold"],
        grid_density=config["music.grid_density"],
        search_interval=config["music.search_interval"],
        peak_floor=config["music.peak_floor"],
    )


def scan_config(config, sweep_interval=None):
    """
    `ScanConfig` described by the ``scan.*`` and ``music.*`` keys;
    `sweep_interval` applies when ``scan.sweep`` is unset.
    """
    try:
        require_unit_interval("scan.gamma", config["scan.gamma"])
        regions(
            config["scan.lambda"], config["scan.trust_level"],
            config["scan.essential_level"],
        )
        return ScanConfig(
            config["scan.lambda"], gamma=config["scan.gamma"],
            trust_level=config["scan.trust_level"],
            essential_level=config["scan.essential_level"],
            sweep_interval=config["scan.sweep"] or sweep_interval,
            subsample_factor=config["scan.subsample_factor"],
            density_prior=config["scan.density_prior"],
            music=music_config(config)._replace(search_interval=None),
            merge_radius=config["scan.merge_radius"],
            detection_lam=config["scan.detection_lambda"],
        )
    except ValueError as exc:
        # pylint: disable=raise-missing-from
        raise ConfigError(str(exc), "scan")


def cluster_model(config, centers, half_lengths, counts=None, gap=0.0):
    """
    `ClusterModel` for the given geometry with the orders and counts of the
    ``clusters.*`` keys.
    """
    max_count = config["clusters.max_count"]
    if max_count is None:
        max_count = (
            max(counts) if counts else config["spectrum.cluster_size"]
        )
    near, far = config["clusters.near_order"], config["clusters.far_order"]
    if near is None and far is None:
        policy = None
    else:
        default = (3, 2) if max_count <= 2 else (5, 3)
        policy = (
            default[0] if near is None else near,
            default[1] if far is None else far,
        )
    return ClusterModel(
        centers, half_lengths, max_count, cluster_gap=gap,
        order_policy=policy, counts=counts,
    )


__all__ = [
    "ConfigError", "ExperimentConfig", "SCHEMA", "parse_config",
    "serialize_config", "load_config", "music_config", "scan_config",
    "cluster_model", "MODES",
]

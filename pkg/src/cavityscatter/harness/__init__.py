"""Configuration, receiver profiles, pipelines and the command-line front end."""

from .config import RunConfig, load_config, parse_config_text, serialize_config
from .profiles import Profile, build_profiles
from .compare import MisfitReport, compare_seismograms

__all__ = ["RunConfig", "load_config", "parse_config_text", "serialize_config",
           "Profile", "build_profiles", "MisfitReport", "compare_seismograms"]

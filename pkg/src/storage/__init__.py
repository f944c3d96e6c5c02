from src.storage.config_files import config_hash, load_config, locate_field, parse_config
from src.storage.outputs import RunWriter, json_safe

__all__ = ["RunWriter", "config_hash", "json_safe", "load_config", "locate_field", "parse_config"]

"""
Configuration Manager
Loads and validates scenario files: policy tunables, simulator settings,
workload and sweep levels
"""

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from core_model import PolicyConfig, PolicyKind
from errors import ConfigError, InvalidSpec
from memory_simulator import SimConfig
from workload import TraceSpec


DEFAULT_SETTINGS_PATH = "config/user_settings.txt"
DEFAULT_CONTENTION_LEVELS = [0.0, 25.0, 50.0, 100.0]

SCENARIO_KEYS = {
    'name', 'policy', 'policies', 'contention_levels', 'trace', 'trace_path',
    'region_bytes', 'seed', 'log_level', 'log_file',
}


def parse_policy(value: Any) -> PolicyKind:
    """Policy from its name, case-insensitive"""
    if isinstance(value, PolicyKind):
        return value
    for kind in PolicyKind:
        if str(value).lower() == kind.value.lower():
            return kind
    raise ConfigError(f"unknown policy {value!r}; expected one of {[k.value for k in PolicyKind]}")


def parse_levels(value: Any) -> List[float]:
    """
    Contention levels from a list or a comma-separated string ("0,25,50,100")

    Raises:
        ConfigError: a level is not a number in [0, 200]
    """
    items = value.split(',') if isinstance(value, str) else list(value)
    levels = []
    for item in items:
        try:
            level = float(item)
        except (TypeError, ValueError):
            raise ConfigError(f"contention level {item!r} is not a number")
        if not 0.0 <= level <= 200.0:
            raise ConfigError(f"contention level {level:g} outside [0, 200]")
        levels.append(level)
    if not levels:
        raise ConfigError("at least one contention level is required")
    return levels


@dataclass
class Scenario:
    """One experiment: a workload replayed under one or more policies"""
    name: str
    policy_cfg: PolicyConfig
    sim_cfg: SimConfig
    policies: List[PolicyKind] = field(default_factory=lambda: [PolicyKind.TIER_BPF])
    trace: Optional[TraceSpec] = None
    trace_path: Optional[str] = None
    region_bytes: Optional[int] = None
    contention_levels: List[float] = field(default_factory=lambda: list(DEFAULT_CONTENTION_LEVELS))

    @property
    def policy(self) -> PolicyKind:
        return self.policies[0]

    @property
    def seed(self) -> int:
        return self.policy_cfg.rng_seed

    def with_seed(self, seed: int) -> 'Scenario':
        """Copy with the simulator and generated trace reseeded"""
        trace = replace(self.trace, seed=seed) if self.trace is not None else None
        return replace(self, policy_cfg=replace(self.policy_cfg, rng_seed=seed), trace=trace)


class ConfigManager:
    """Manages scenario loading and validation"""

    def __init__(self, config_path: str, settings_path: str = DEFAULT_SETTINGS_PATH):
        """
        Initialize configuration manager

        Args:
            config_path: Path to the scenario file (.yaml or .json)
            settings_path: Optional KEY=VALUE file for {KEY} placeholders
        """
        self.config_path = config_path
        self.settings_path = settings_path
        self.config: Dict[str, Any] = {}
        self.user_settings = self._load_user_settings()
        self._load_config()

    def _load_user_settings(self) -> Dict[str, str]:
        """Load placeholder values from the user settings file"""
        settings: Dict[str, str] = {}
        if not self.settings_path or not os.path.exists(self.settings_path):
            return settings

        try:
            with open(self.settings_path, 'r', encoding='utf-8') as f:
                lines = f.readlines()
        except UnicodeDecodeError as e:
            raise ConfigError(f"Settings file {self.settings_path} is not UTF-8 text: {e}")

        for line in lines:
            line = line.strip()
            # Skip comments and empty lines
            if not line or line.startswith('#'):
                continue
            if '=' in line:
                key, value = line.split('=', 1)
                settings[key.strip()] = value.strip()
        return settings

    def _substitute_variables(self, text: str) -> str:
        result = text
        for key, value in self.user_settings.items():
            result = result.replace(f"{{{key}}}", value)
        return result

    def _substitute_in_dict(self, data: Any) -> Any:
        """Recursively substitute variables in dictionaries and lists"""
        if isinstance(data, dict):
            return {key: self._substitute_in_dict(value) for key, value in data.items()}
        elif isinstance(data, list):
            return [self._substitute_in_dict(item) for item in data]
        elif isinstance(data, str):
            return self._substitute_variables(data)
        else:
            return data

    def _load_config(self) -> None:
        """Load the scenario file; JSON loads through the YAML parser"""
        if not os.path.exists(self.config_path):
            raise ConfigError(f"Configuration file not found: {self.config_path}")

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                raw_config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Error parsing configuration file {self.config_path}: {e}")
        except UnicodeDecodeError as e:
            raise ConfigError(f"Configuration file {self.config_path} is not UTF-8 text: {e}")

        if raw_config is None:
            raw_config = {}
        if not isinstance(raw_config, dict):
            raise ConfigError(f"{self.config_path}: top level must be a mapping")

        self.config = self._substitute_in_dict(raw_config)
        self._validate_config()

    def _validate_config(self) -> None:
        """Reject unknown keys and build every typed section once"""
        known = SCENARIO_KEYS | set(PolicyConfig.field_names()) | set(SimConfig.field_names())
        unknown = sorted(set(self.config) - known)
        if unknown:
            raise ConfigError(f"{self.config_path}: unknown keys {unknown}")
        if 'trace' in self.config and 'trace_path' in self.config:
            raise ConfigError(f"{self.config_path}: give either 'trace' or 'trace_path', not both")
        if 'trace' not in self.config and 'trace_path' not in self.config:
            raise ConfigError(f"{self.config_path}: a 'trace' spec or a 'trace_path' is required")

        self.get_scenario()

    def _resolve_trace_path(self, raw: str) -> str:
        """Trace path as given, else relative to the config file; must exist"""
        if os.path.exists(raw):
            return raw
        beside = Path(self.config_path).parent / raw
        if not os.path.isabs(raw) and beside.exists():
            return str(beside)
        raise ConfigError(f"Trace file not found: {raw}")

    def get_policy_config(self) -> PolicyConfig:
        values = dict(self.config)
        if 'seed' in values:
            values['rng_seed'] = values['seed']
        try:
            return PolicyConfig.from_dict(values)
        except TypeError as e:
            raise ConfigError(f"{self.config_path}: {e}")

    def get_sim_config(self) -> SimConfig:
        try:
            return SimConfig.from_dict(self.config)
        except TypeError as e:
            raise ConfigError(f"{self.config_path}: {e}")

    def get_policies(self) -> List[PolicyKind]:
        if 'policies' in self.config:
            raw = self.config['policies']
            if not isinstance(raw, list) or not raw:
                raise ConfigError("'policies' must be a non-empty list")
            return [parse_policy(p) for p in raw]
        return [parse_policy(self.config.get('policy', PolicyKind.TIER_BPF.value))]

    def get_sweep_levels(self) -> List[float]:
        return parse_levels(self.config.get('contention_levels', DEFAULT_CONTENTION_LEVELS))

    def get_trace_spec(self) -> Optional[TraceSpec]:
        raw = self.config.get('trace')
        if raw is None:
            return None
        if not isinstance(raw, dict):
            raise ConfigError("'trace' must be a mapping")
        if 'seed' in self.config and 'seed' not in raw:
            raw = {**raw, 'seed': self.config['seed']}
        try:
            return TraceSpec.from_dict(raw)
        except (InvalidSpec, TypeError) as e:
            raise ConfigError(f"{self.config_path}: invalid trace: {e}")

    def get_scenario(self) -> Scenario:
        """
        Build the Scenario described by the file

        Raises:
            ConfigError: any section is invalid or the trace file is missing
        """
        trace_path = self.config.get('trace_path')
        region_bytes = self.config.get('region_bytes')
        if region_bytes is not None and (not isinstance(region_bytes, int) or region_bytes <= 0):
            raise ConfigError(f"'region_bytes' must be a positive integer, got {region_bytes!r}")
        return Scenario(
            name=str(self.config.get('name', Path(self.config_path).stem)),
            policy_cfg=self.get_policy_config(),
            sim_cfg=self.get_sim_config(),
            policies=self.get_policies(),
            trace=self.get_trace_spec(),
            trace_path=self._resolve_trace_path(trace_path) if trace_path else None,
            region_bytes=region_bytes,
            contention_levels=self.get_sweep_levels(),
        )

    def get_logging_config(self) -> Dict[str, Any]:
        """Logging settings for init_logger_from_config"""
        config: Dict[str, Any] = {}
        if 'log_level' in self.config:
            config['level'] = self.config['log_level']
        if 'log_file' in self.config:
            config['log_file'] = self.config['log_file']
        return config

    def reload(self) -> None:
        """Reload configuration from file"""
        self.user_settings = self._load_user_settings()
        self._load_config()

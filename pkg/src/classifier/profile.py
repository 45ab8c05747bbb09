import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from src.config import PROFILES_DIR, Tolerances
from src.errors import ProfileError

log = logging.getLogger(__name__)


class ProfileManager:
    """Tolerance profiles stored as YAML mappings of Tolerances fields."""

    @staticmethod
    def resolve_path(name_or_path: str | Path, profiles_dir: Path = PROFILES_DIR) -> Path:
        path = Path(name_or_path)
        if not path.suffix:
            path = path.with_suffix(".yaml")
        if not path.exists() and (profiles_dir / path).exists():
            path = profiles_dir / path
        return path

    @staticmethod
    def load_profile(name_or_path: str | Path, profiles_dir: Path = PROFILES_DIR) -> Dict[str, Any]:
        """
        Load a profile by path, or by bare name from the profiles directory.
        """
        path = ProfileManager.resolve_path(name_or_path, profiles_dir)
        if not path.exists():
            raise ProfileError(f"Profile not found: {name_or_path}")
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ProfileError(f"Error loading profile {path}: {e}") from e
        if not isinstance(data, dict):
            raise ProfileError(f"Profile {path} is not a mapping")
        log.debug("loaded profile %s", path)
        return data

    @staticmethod
    def save_profile(name: str | Path, config: Dict[str, Any], profiles_dir: Path = PROFILES_DIR) -> Path:
        path = Path(name)
        if not path.suffix:
            path = path.with_suffix(".yaml")
        if len(path.parts) == 1:
            path = profiles_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            yaml.dump(config, f, default_flow_style=False)
        return path

    @staticmethod
    def list_profiles(profiles_dir: Path = PROFILES_DIR) -> list[str]:
        if not profiles_dir.exists():
            return []
        return sorted(p.stem for p in profiles_dir.glob("*.yaml"))

    @staticmethod
    def resolve_tolerances(
        overrides: Optional[Dict[str, Any]] = None,
        profile: Optional[str | Path] = None,
        profiles_dir: Path = PROFILES_DIR,
    ) -> Tolerances:
        """Explicit values beat the profile, the profile beats the defaults."""
        merged: Dict[str, Any] = {}
        if profile:
            merged.update(ProfileManager.load_profile(profile, profiles_dir))
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            return Tolerances.from_mapping(merged)
        except (TypeError, ValueError) as e:
            raise ProfileError(f"invalid tolerance value: {e}") from e

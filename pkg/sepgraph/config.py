from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class SepgraphSettings(BaseSettings):
    """Settings for separatrix extraction and simplification."""

    model_config = SettingsConfigDict(env_prefix="sepgraph_", case_sensitive=False)

    # Logging
    LOG_LEVEL: str = "WARNING"  # Root log level used by the CLI

    # Search settings
    ORACLE_NODE_BUDGET: int = 1_000_000  # Visited nodes before the oracle gives up
    SNAPSHOT_UNDO: bool = False  # Backtrack with whole-graph snapshots instead of the journal
    MAX_WALK_STEPS: int = 1_000_000  # Guard on straight walks along streamlines

    # Energy weights
    ENERGY_LAMBDA_R: float = 1.0  # Weight on the regular vertex count
    ENERGY_LAMBDA_W: float = 1.0  # Weight on the summed drift of rewired edges

    # Export settings
    JSON_FLOAT_DIGITS: int = 12  # Rounding applied to floats in canonical JSON
    SVG_SIZE_INCHES: float = 8.0  # Width and height of rendered figures


@lru_cache()
def get_settings() -> SepgraphSettings:
    return SepgraphSettings()

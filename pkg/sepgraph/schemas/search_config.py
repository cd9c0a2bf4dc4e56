"""
Pydantic schemas for simplification stop criteria and energy weights
"""
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from ..config import get_settings


class StopCriteria(BaseModel):
    """When the greedy simplification loop stops."""
    target_regular: Optional[int] = Field(default=None, ge=0)
    target_percent: Optional[float] = Field(default=None, ge=0.0, le=100.0)
    max_drift: Optional[float] = Field(default=None, gt=0.0)
    max_macro_ops: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def at_least_one_criterion(self) -> "StopCriteria":
        if (
            self.target_regular is None
            and self.target_percent is None
            and self.max_drift is None
            and self.max_macro_ops is None
        ):
            raise ValueError("at least one stop criterion must be set")
        return self

    def regular_target_reached(self, regular: int, initial_regular: int) -> bool:
        if self.target_regular is not None and regular <= self.target_regular:
            return True
        if self.target_percent is not None:
            # a reduction of X% means |R| <= (1 - X/100) * |R0|
            return regular <= (1.0 - self.target_percent / 100.0) * initial_regular
        return False


class EnergyConfig(BaseModel):
    """Weights of the simplification energy."""
    lambda_r: float = Field(default_factory=lambda: get_settings().ENERGY_LAMBDA_R, ge=0.0)
    lambda_w: float = Field(default_factory=lambda: get_settings().ENERGY_LAMBDA_W, ge=0.0)

    @model_validator(mode="after")
    def not_both_zero(self) -> "EnergyConfig":
        if self.lambda_r == 0.0 and self.lambda_w == 0.0:
            raise ValueError("energy weights cannot both be zero")
        return self

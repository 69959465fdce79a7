"""Experiment controllers; importing this package registers one per CLI mode."""

from besov_rates.controllers import linear_oracle, lower_bound, rates, simulate, verify
from besov_rates.controllers.base import CONTROLLERS, Controller

__all__ = ["CONTROLLERS", "Controller", "linear_oracle", "lower_bound", "rates", "simulate", "verify"]

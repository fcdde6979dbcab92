from .gaussian import (bivariate_normal_gibbs, log_normal, normal_mis_exact, normal_mis_t,
                       normal_rwm)
from .probit import (ProbitGibbs, ProbitModel, probit_beta_update, probit_lambda,
                     probit_metrics, probit_z_update)
from .pump import PumpGibbs, PumpModel, load_pump_data, pump_gibbs_update

__all__ = [
    "PumpGibbs", "PumpModel", "ProbitGibbs", "ProbitModel", "bivariate_normal_gibbs",
    "load_pump_data", "log_normal", "normal_mis_exact", "normal_mis_t", "normal_rwm",
    "probit_beta_update", "probit_lambda", "probit_metrics", "probit_z_update",
    "pump_gibbs_update",
]

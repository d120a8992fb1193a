"""Numeric tolerances shared across modules."""

import math

# Normalized scorers may exceed log-probability 0 by at most this much.
EPS_NORM = 1e-9

# Probability floor before logs/ratios. Estimators refuse values below it;
# metrics clamp to it and report how often they did.
PROB_FLOOR = 1e-12
LOG_PROB_FLOOR = math.log(PROB_FLOOR)

# Ridge damping on regression normal equations.
RIDGE = 1e-8

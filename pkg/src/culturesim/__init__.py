"""Cultural evolution on a lattice: creator/imitator agents with neural
invention biases, plus discounting analysis of the resulting time series."""

__version__ = "0.1.0"

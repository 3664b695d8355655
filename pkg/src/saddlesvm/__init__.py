"""Linear SVM training via an entropy-regularized saddle-point solver.

Public surface:
  - data_model: LIBSVM parsing and the Dataset container
  - preprocess: scaling, random signs, normalized Walsh-Hadamard transform
  - saddle_core: the centralized solver (hard-margin and nu modes)
  - geometry_oracle: Gilbert baseline and a certified Frank-Wolfe oracle
  - distributed: simulated multi-client training with a traffic meter
  - cli: the ``saddlesvm`` command-line entry point
"""
from .backend import BACKEND
from .data_model import Dataset, load_libsvm, parse_libsvm
from .saddle_core import Mode, SolveConfig, Solution, solve

__all__ = ["BACKEND", "Dataset", "load_libsvm", "parse_libsvm",
           "Mode", "SolveConfig", "Solution", "solve"]
__version__ = "0.1.0"

"""Binary Gaussian copula synthesis for minority-class augmentation of binary tables."""

from .augment import AUGMENTERS, augment_to_balance
from .copula import (BgcsModel, binary_corr_from_copula, estimate_correlation,
                     estimate_marginals, fit_bgcs, joint_pmf_2d, sample_bgcs)
from .data import BinaryTable, ClassBalance, DataError, SeedSpec, load_csv, save_csv

__version__ = "0.1.0"

"""Shared fixtures: the published parameter set and its companions."""

import pytest

from giapop import AdaptiveConfig, ModelParams, ObserverParams

# Published plant constants used across the suite (also shipped as the
# default config).
PAPER_MODEL = dict(r0=0.179527, K=6.596e7, beta_d=0.00874109,
                   beta_m=0.04162605, w_m=45.8677, sigma=0.52947229225)

# Frozen extended-precision oracles (50-digit arithmetic, rounded here
# to double).
X2_STAR = 3.6064912520016490          # open-loop fixed point of x2
RES_DECAY = 0.011669484664295713      # sigma^2 * beta_m
GAMMA_LOW = 8.4724597528031749e-10    # observer gain threshold
GROWTH_AT_EXAMPLE = 0.12117992172441333   # r at (x1=1e5, x2=4.8, u=0)
DX1_AT_EXAMPLE = 12099.620443859705
DX2_AT_EXAMPLE = -0.055962257110668669
CONST_DOSE = 46.089359251343533       # ug/ml at delta = 0.024
ADAPTIVE_DOSE_0 = 83.828571428571429  # ug/ml at (y=1e5, x2_hat=11.25), eta=0.024
RICCATI_AT_10 = 78637.34793332516     # y0=1e5, K, delta=0.024, t=10
NAIVE_AT_10 = 78662.786106655341
UGML_PER_320UM = 54.771074026529739


@pytest.fixture
def params():
    return ModelParams(**PAPER_MODEL)


@pytest.fixture
def observer():
    return ObserverParams(lam=1.14e-2, gamma=1.70e-9)


@pytest.fixture
def paper_design():
    # The published adaptive bounds, including the eta = delta choice
    # that sits below the guarantee floor.
    return AdaptiveConfig(r0_bar=3e-9, beta_m_bar=0.05, beta_d_low=0.007,
                          eta=0.024, delta=0.024)

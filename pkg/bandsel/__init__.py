"""
bandsel - Kernel trend estimation with martingale-difference noise

This package provides the Priestley-Chao smoother, Mallows' CL bandwidth
selection, ARCH(1) noise and a seeded Monte Carlo study of the selected
bandwidths against their asymptotic normal law.
"""

__version__ = '0.3.0'

"""
THz Indoor Coverage Lab

Analytic and Monte Carlo evaluation of the downlink coverage probability of
indoor terahertz networks with blockage, MFTR fading and beam pointing error.
"""

__version__ = "1.0.0"
__author__ = "THz Coverage Lab Team"
__description__ = "Dual-engine coverage probability lab for indoor THz networks"

"""TierSim - Tiered-Memory Migration Simulator"""
__version__ = "1.0.0"

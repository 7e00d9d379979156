"""Core configuration and constants for the rank test engine"""

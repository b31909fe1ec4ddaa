"""Test package for sym-orbits"""

"""Gherkin step definitions for sym-orbits tests"""

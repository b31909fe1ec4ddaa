"""Core abstractions, errors and shared linear algebra"""

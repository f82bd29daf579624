"""Core domain models, exceptions and interfaces"""

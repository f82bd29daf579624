"""Discrete convexity of curves, height fields and surfaces"""

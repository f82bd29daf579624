"""Curve shortening flow services"""

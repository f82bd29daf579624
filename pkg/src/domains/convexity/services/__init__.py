"""Convexity certificates and the convexity chain"""

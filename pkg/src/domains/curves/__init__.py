"""Curve shortening flow and Hamilton's Harnack quantity"""

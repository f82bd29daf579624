"""Harnack Lab - Source Code"""

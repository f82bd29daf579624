"""Cones, graphical flows, self-expanders and the space-time track"""

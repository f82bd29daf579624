"""Heat solution services"""

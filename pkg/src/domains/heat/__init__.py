"""Heat-equation Harnack inequalities"""

"""Self-expanders asymptotic to cones over convex curves"""

"""
All of the files in the charts/ directory define coordinate patches that stand in for a Fedosov
manifold with trivial metaplectic structure: a grid, an adapted symplectic frame sampled on it and
the connection coefficients of the frame.

The base class lives in base.py; flat.py and sphere.py build the two case-study charts and io.py
loads chart configs and exports sampled fields.
"""

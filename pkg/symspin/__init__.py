"""
Top level package. Numerical calculus of symplectic spinor fields over truncated
Hermite bases, plus the flat and round-sphere Killing spinor case studies.
"""

"""
Convergence criterion and multifractal analysis of cascade paths.
"""

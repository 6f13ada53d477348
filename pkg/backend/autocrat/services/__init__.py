"""
Autocrat - Services

Game loading, solving, exact recovery, strategy synthesis and verification.
"""

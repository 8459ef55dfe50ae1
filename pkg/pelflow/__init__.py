"""
pelflow - regularized pel-recursive optical flow with GCV-selected regularization.
"""
__version__ = "1.0.0"

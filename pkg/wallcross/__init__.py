"""
Wall-crossing package entrypoint.
"""

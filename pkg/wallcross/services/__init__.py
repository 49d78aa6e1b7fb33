"""Service modules package."""

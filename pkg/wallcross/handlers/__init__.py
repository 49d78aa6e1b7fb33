"""Handler modules package."""


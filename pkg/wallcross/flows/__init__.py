"""Flow modules package."""


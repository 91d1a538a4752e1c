"""Services: strategies, exact oracle, lower bound, tuning, serialization and verification."""

"""Cost-optimal placement of UAV service VNFs over edge, aggregation and cloud hosts."""

__version__ = "0.1.0"

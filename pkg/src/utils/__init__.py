"""
Utilities package.
"""
from .file_handler import FileHandler, FileValidator
from .reporter import ReportWriter

__all__ = [
    "FileHandler",
    "FileValidator",
    "ReportWriter",
]

"""File output for verification runs"""
from .file_storage import ReportStorage, read_gridfield

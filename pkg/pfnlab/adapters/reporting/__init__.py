from .report_writer import FileReportWriter

__all__ = ["FileReportWriter"]

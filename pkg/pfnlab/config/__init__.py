from .app_settings import AppSettings, app_settings

__all__ = ["AppSettings", "app_settings"]

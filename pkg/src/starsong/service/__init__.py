from .app import SessionManager, create_app, parameter_table

__all__ = ["SessionManager", "create_app", "parameter_table"]

from .app import Services, create_app
from .config import ApiConfig, load_config

__all__ = ["ApiConfig", "Services", "create_app", "load_config"]

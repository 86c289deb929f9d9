import sys
from datetime import datetime

from loguru import logger as _logger

from app.config import PROJECT_ROOT, config


LOG_DIR = PROJECT_ROOT / "logs"

_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[command]}</cyan> | {name}:{line} - <level>{message}</level>"
)


def define_log_level(print_level="INFO", logfile_level="DEBUG", name: str = None):
    """Reset the sinks: stderr at print_level, a rotating file at logfile_level.

    Records carry the running subcommand in `extra["command"]`; bind it with
    `logger.contextualize(command=...)`.
    """
    formatted_date = datetime.now().strftime("%Y%m%d%H%M%S")
    log_name = f"{name}_{formatted_date}" if name else formatted_date

    _logger.remove()
    _logger.configure(extra={"command": "-"})
    _logger.add(sys.stderr, level=print_level, format=_FORMAT)
    _logger.add(
        LOG_DIR / f"{log_name}.log",
        level=logfile_level,
        format=_FORMAT,
        rotation="10 MB",
        delay=True,
    )
    return _logger


logger = define_log_level(print_level=config.runtime.log_level, name="glance")

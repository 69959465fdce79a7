"""Map exceptions to process exit codes and machine-readable error documents."""

from collections.abc import Callable
from typing import Any

from essentials.exceptions import InvalidArgument, InvalidOperation, ObjectNotFound
from pydantic import ValidationError

from besov_rates.core.exceptions import BlowUpError, CouplingError, OmegaViolation
from besov_rates.core.logging import logger

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_COUPLING = 3
EXIT_PATH_FAILURE = 4
EXIT_NOT_FOUND = 5
EXIT_SOFTWARE = 70

ErrorDocument = dict[str, Any]
Handler = Callable[[Any], tuple[int, ErrorDocument]]


def error_document(detail: str, exit_code: int, errors: list[dict[str, Any]] | None = None) -> ErrorDocument:
    return {
        "detail": detail,
        "exit_code": exit_code,
        "errors": errors or [],
    }


def validation_error(exception: ValidationError) -> tuple[int, ErrorDocument]:
    logger.debug("Validation ERROR", exc_info=exception)
    errors = [
        {"loc": ".".join(str(part) for part in error["loc"]), "msg": error["msg"], "type": error["type"]}
        for error in exception.errors()
    ]
    detail = f"{len(errors)} invalid configuration value(s)"
    return EXIT_CONFIGURATION, error_document(detail, EXIT_CONFIGURATION, errors)


def bad_argument(exception: Exception) -> tuple[int, ErrorDocument]:
    logger.debug("Configuration ERROR", exc_info=exception)
    return EXIT_CONFIGURATION, error_document(str(exception) or "Invalid configuration", EXIT_CONFIGURATION)


def coupling_error(exception: Exception) -> tuple[int, ErrorDocument]:
    logger.debug("Coupling ERROR", exc_info=exception)
    return EXIT_COUPLING, error_document(str(exception) or "Levels are not nested", EXIT_COUPLING)


def blow_up(exception: BlowUpError) -> tuple[int, ErrorDocument]:
    logger.debug("Blow-up ERROR", exc_info=exception)
    location = {"t": exception.t, "x": exception.x, "value": repr(exception.value)}
    return EXIT_PATH_FAILURE, error_document(str(exception), EXIT_PATH_FAILURE, [location])


def path_failure(exception: Exception) -> tuple[int, ErrorDocument]:
    logger.debug("Path ERROR", exc_info=exception)
    return EXIT_PATH_FAILURE, error_document(str(exception) or "Path failure", EXIT_PATH_FAILURE)


def not_found(exception: Exception) -> tuple[int, ErrorDocument]:
    return EXIT_NOT_FOUND, error_document(str(exception) or "Not found", EXIT_NOT_FOUND)


def file_not_found(exception: Exception) -> tuple[int, ErrorDocument]:
    return EXIT_NOT_FOUND, error_document(str(exception) or "File not found", EXIT_NOT_FOUND)


def server_error(exception: Exception) -> tuple[int, ErrorDocument]:
    logger.error("Unexpected ERROR", exc_info=exception)
    return EXIT_SOFTWARE, error_document(f"Unexpected error: {type(exception).__name__}", EXIT_SOFTWARE)


ERROR_HANDLERS: dict[type[Exception], Handler] = {
    ValidationError: validation_error,
    InvalidArgument: bad_argument,
    CouplingError: coupling_error,
    BlowUpError: blow_up,
    OmegaViolation: path_failure,
    InvalidOperation: path_failure,
    ObjectNotFound: not_found,
    FileNotFoundError: file_not_found,
    Exception: server_error,
}


def handle_error(exception: Exception) -> tuple[int, ErrorDocument]:
    """Dispatch to the handler of the closest registered base class."""
    for cls in type(exception).__mro__:
        if cls in ERROR_HANDLERS:
            return ERROR_HANDLERS[cls](exception)
    return server_error(exception)

from pydantic import ValidationError
import logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILURE = 1
EXIT_USAGE = 2


class RisKitError(Exception):
    """Base class for every error raised by the toolkit"""
    exit_code = EXIT_USAGE


class ConfigError(RisKitError):
    """Config file or sweep spec could not be read or failed schema validation"""


class ScenarioValidationError(RisKitError, ValueError):
    """A scenario value or operation argument violates its invariants"""


class DomainError(RisKitError, ArithmeticError):
    """A formula is evaluated outside the region where it is defined"""


class ValidationFailure(RisKitError):
    """Monte Carlo estimates disagree with their closed-form predictions"""
    exit_code = EXIT_VALIDATION_FAILURE


def config_error_from_pydantic(exc: ValidationError, source: str) -> ConfigError:
    """Collapse pydantic diagnostics into a single ConfigError message"""
    problems = []
    for err in exc.errors():
        location = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
        problems.append(f"{location}: {err.get('msg')}")
    return ConfigError(f"Invalid {source}: " + "; ".join(problems))


def validation_failure_handler(exc: ValidationFailure) -> int:
    """Handle flagged moment identities"""
    logger.error(f"Validation failed: {str(exc)}")
    return exc.exit_code


def config_error_handler(exc: RisKitError) -> int:
    """Handle config, schema and scenario errors"""
    logger.error(f"Configuration error: {str(exc)}")
    return exc.exit_code


def usage_error_handler(exc: Exception) -> int:
    """Handle bad arguments that slipped past the parser"""
    logger.error(f"Usage error: {str(exc)}")
    return EXIT_USAGE


def general_exception_handler(exc: Exception) -> int:
    """Handle all other exceptions"""
    logger.error(f"Unexpected error: {str(exc)}", exc_info=True)
    return EXIT_USAGE


def handle_exception(exc: Exception) -> int:
    """Route an exception to its handler and return the process exit code"""
    if isinstance(exc, ValidationFailure):
        return validation_failure_handler(exc)
    if isinstance(exc, RisKitError):
        return config_error_handler(exc)
    if isinstance(exc, (ValueError, IndexError, FileNotFoundError)):
        return usage_error_handler(exc)
    return general_exception_handler(exc)

import functools
import logging
import time
from typing import Any, Callable, Type, TypeVar

F = TypeVar("F", bound=Callable[..., Any])

logger = logging.getLogger(__name__)


def validate_assertions(exception: Type[Exception]) -> Callable[[F], F]:
    """
    Decorator that validates assertions in a function and raises a specified
    exception if an assertion fails.

    The assertion message becomes the message of the raised exception, so
    validation methods should give every assert a readable message.

    Args:
        exception (Type[Exception]): The exception to raise if an assertion
            fails.

    Returns:
        Callable: The decorated function.
    """

    def decorator(function: F) -> F:
        """
        Inner decorator function that wraps the input function and performs
        the assertion validation.

        Args:
            function (Callable): The function to decorate.

        Returns:
            Callable: The wrapped function.
        """

        @functools.wraps(function)
        def wrapper(*args, **kwargs) -> Any:
            try:
                return function(*args, **kwargs)
            except AssertionError as e:
                message = str(e) or f"{function.__qualname__} failed"
                logger.debug(
                    "Validation failed in %s: %s",
                    function.__qualname__,
                    message,
                )
                raise exception(message) from e

        return wrapper

    return decorator


def timing(f: F) -> F:
    """
    Decorator to log the execution time of a function.

    Args:
        f (Callable): The function to be timed.

    Returns:
        Callable: The wrapped function with added timing functionality.
    """

    @functools.wraps(f)
    def wrap(*args: Any, **kwargs: Any) -> Any:
        start_time = time.perf_counter()
        result = f(*args, **kwargs)
        end_time = time.perf_counter()
        logger.debug(
            "%s finished in %.4f seconds",
            f.__qualname__,
            end_time - start_time,
        )
        return result

    return wrap

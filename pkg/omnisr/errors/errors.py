"""The module which defines the base functionalities for errors that will be raised when using the package or the CLI.

This module only includes the generic utilities using which each sub-package should define its own errors
specifically. See :obj:`omnisr.geometry.errors` as an example on how to achieve this.

Every error maps one or more process *exit codes* to messages. The exit codes form a stable contract of the command
line interface: ``1`` signals a domain or validation error, ``2`` an I/O error.
"""

import sys
from collections import OrderedDict
from typing import ClassVar, NoReturn, Self

from loguru import logger

ExitCode = int
"""An alias for the built-in ``int`` type, which is used for process exit codes."""

EXIT_VALIDATION: ExitCode = 1
"""The exit code for domain and validation errors, e.g. a raster with an invalid geometry."""

EXIT_IO: ExitCode = 2
"""The exit code for input/output errors, e.g. an unreadable raster file."""


def _listify(item: str | list[str]) -> list[str]:
    """Encloses the given (single) string in a list or returns the same input as-is in case of a list of strings.

    Example:
        .. code-block:: python

            # The following evaluate to True
            _listify("test") == ["test"]
            _listify(["a", "b"]) == ["a", "b"]
            _listify([]) == []
    """
    return item if isinstance(item, list) else [item]


def _stringify(item: str | list[str], delimiter: str) -> str:
    """Makes a single string out of the item(s) by delimiting them with ``delimiter``."""
    return delimiter.join(_listify(item))


class OmniError(Exception):
    """The base class for all errors of the package.

    This is a derivative of the ``Exception`` class and therefore can be used directly in ``raise`` statements.

    Attributes:
        __dict (``OrderedDict[ExitCode, str]``):
            An ordered dictionary in which the keys are exit codes and the values are the corresponding messages.
    """

    descriptor_delimiter: ClassVar[str] = " |OR| "
    """A delimiter to divide the message part of several errors which have been combined into a single one.

    Example:
        .. code-block:: python

            error_a = OmniError({1: "Bad geometry"})
            error_b = OmniError({1: "Bad weights"})
            errors = error_a | error_b

            # When rendered in the CLI help, the following string is generated
            "Bad geometry |OR| Bad weights"
    """

    def __init__(self, args_dict: OrderedDict[ExitCode, str | list[str]] | dict) -> None:
        """Initializes the error object given a dictionary of exit codes (keys) and messages (values).

        Example:
            .. code-block:: python

                error_a = OmniError({1: "Bad geometry"})
                error_b = OmniError({2: "Cannot read"})
                errors = error_a | error_b
                errors_list = OmniError({1: ["Bad geometry", "Still bad geometry"]})
        """
        self.__dict: OrderedDict = OrderedDict(args_dict)
        self.extra_information: dict | None = None
        super().__init__(self.message)

    def __str__(self) -> str:
        """Returns all messages of the error, delimited by :obj:`OmniError.descriptor_delimiter`."""
        return self.message

    @property
    def message(self) -> str:
        """All messages of the error as a single string."""
        return self.descriptor_delimiter.join(
            _stringify(msg, self.descriptor_delimiter) for msg in self.__dict.values()
        )

    def __or__(self, other: Self) -> Self:
        """Implements the bitwise `or` ``|`` which combines the error objects into a single error.

        In case of the same exit codes, the messages will be combined into a list.

        Example:
            .. code-block:: python

                error_a = OmniError({1: "Bad geometry"})
                error_b = OmniError({2: "Cannot read"})
                error_c = OmniError({1: "Bad weights"})

                errors_combined = error_a | error_b | error_c

                # which is equivalent to the following
                errors_combined_literal = OmniError({
                    1: ["Bad geometry", "Bad weights"],
                    2: "Cannot read"
                })
        """
        buff = OrderedDict(self.__dict)
        for key, msg in other.__dict.items():
            self_msg = buff.get(key, None)
            buff[key] = list(_listify(self_msg)) if self_msg else []
            buff[key].extend(_listify(msg))
        return OmniError(buff)

    def __retrieve_one_from_some(self, exit_code: ExitCode | None = None) -> tuple[ExitCode, str | list[str]]:
        """Retrieves a tuple ``(<exit-code>, <message>)`` from the internal dictionary :obj:`OmniError.__dict`.

        Raises:
            ValueError:
                In case of ambiguity, i.e. there are multiple items in the internal dictionary and the
                ``exit_code`` is ``None``.

            KeyError:
                When the given ``exit_code`` cannot be found.
        """
        match exit_code, len(self.__dict):
            # Ambiguity, several items in the dictionary but the exit code has not been given
            case None, n if n > 1:
                raise ValueError("In case of multiple exit codes, the exit code must be specified.")

            case ExitCode(), n if n >= 1:
                if exit_code in self.__dict.keys():
                    return exit_code, self.__dict[exit_code]
                raise KeyError(f"Exit code {exit_code} cannot be found.")

            case _, 1:
                return next(iter(self.__dict.items()))

            # The internal dictionary is empty and the exit code is None.
            case _:
                return EXIT_VALIDATION, "Generic Error"

    def get_error_details(
            self,
            extra_information: dict | None = None,
            exit_code: ExitCode | None = None) -> tuple[ExitCode, str]:
        """Gets the details of the error.

        Args:
            extra_information (Optional, default ``None``):
                More information (if any) that needs to be added to the message string.
            exit_code (Optional, default ``None``):
                The exit code to retrieve. In case of ``None``, the internal dictionary must include a single entry,
                otherwise an error is raised.

        Returns:
            A tuple, in which the first element is the exit code and the second element is a single string message.
        """
        exit_code, msg = self.__retrieve_one_from_some(exit_code)
        msg = _stringify(msg, self.descriptor_delimiter)
        extra_information = extra_information or self.extra_information
        return exit_code, msg + (f" :=> {extra_information}" if extra_information else "")

    def with_information(self, **extra_information) -> Self:
        """Returns a copy of the error which carries ``extra_information`` into its logs.

        Example:
            .. code-block:: python

                raise Geometry.OutOfHemisphere.with_information(rho=1.2)
        """
        error = OmniError(self.__dict)
        error.extra_information = extra_information
        return error

    def log_as_warning(
            self,
            extra_information: dict | None = None,
            exit_code: ExitCode | None = None) -> None:
        """Same as :func:`~OmniError.get_error_details` but logs the error as a warning and returns ``None``."""
        _, msg = self.get_error_details(extra_information, exit_code)
        logger.warning(msg)

    def sys_exit_log(
            self,
            extra_information: dict | None = None,
            exit_code: ExitCode | None = None) -> NoReturn:
        """Same as :func:`~OmniError.get_error_details` but logs the error and calls the ``sys.exit``.

        The process exits with the exit code stored in the error.

        Warning:
            This is supposed to be done in case of non-recoverable errors, i.e. at the CLI boundary. Library code
            raises the errors instead.
        """
        exit_code, msg = self.get_error_details(extra_information, exit_code)
        logger.error(msg)
        sys.exit(exit_code)

    @property
    def exit_code(self) -> ExitCode:
        """The exit code of the error, i.e. the first (or only) one if several errors have been combined."""
        return next(iter(self.__dict.keys()), EXIT_VALIDATION)

    @property
    def help_descriptor(self) -> dict[ExitCode, str]:
        """Gets the descriptor (dictionary) of the error items stored in :obj:`OmniError.__dict`.

        Example:
             .. code-block:: python

            error_a = OmniError({1: "Bad geometry"})
            error_b = OmniError({2: "Cannot read"})
            error_c = OmniError({1: "Bad weights"})

            errors_combined = error_a | error_b | error_c
            errors_combined.help_descriptor == {
                1: "Bad geometry |OR| Bad weights",
                2: "Cannot read"
            }
        """
        return {
            code: _stringify(msg, self.descriptor_delimiter)
            for code, msg in self.__dict.items()
        }


class ErrorGroup:
    """A class which groups related errors.

    This provides a base class from which actual error groups are derived. The attributes of this class are all static.

    See :obj:`omnisr.geometry.errors` as an example on how to achieve this.
    """

    @classmethod
    def members(cls) -> dict[str, OmniError]:
        """Retrieves a dictionary of all errors which are members of the class."""
        return {k: v for k, v in cls.__dict__.items() if isinstance(v, OmniError)}

    @classmethod
    def union(cls) -> OmniError:
        """Gets the union of all member errors in the group.

        This is useful when one wants to get the help descriptor of all members. This function utilizes the bitwise
        `or` ``|`` functionality of :obj:`OmniError`.
        """
        buff = None
        for v in cls.members().values():
            if buff is None:
                buff = v
            else:
                buff |= v
        return buff

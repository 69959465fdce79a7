"""Use this module to register required services.

Services registered with ``add_service`` are built into a `rodi.Container` by
``configure_services`` and injected into experiment controllers by type.
"""

from typing import Literal, TypeVar

from rodi import Container

from besov_rates.settings import ExperimentConfig

ScopeType = Literal["scoped", "singleton", "transient"]

T = TypeVar("T")

_registrations: list[tuple[ScopeType, type]] = []


def add_service(scope: ScopeType = "singleton"):
    """Register a service with the specified scope for every container built afterwards."""

    def decorator(target: T) -> T:
        if scope not in ("scoped", "singleton", "transient"):
            raise ValueError(f"Invalid scope: {scope}")
        _registrations.append((scope, target))  # pyright: ignore[reportArgumentType]
        return target

    return decorator


def configure_services(
    settings: ExperimentConfig,
) -> tuple[Container, ExperimentConfig]:
    container = Container()
    container.add_instance(settings)

    for scope, target in _registrations:
        match scope:
            case "scoped":
                _ = container.add_scoped(target)
            case "singleton":
                _ = container.add_singleton(target)
            case "transient":
                _ = container.add_transient(target)

    return container, settings

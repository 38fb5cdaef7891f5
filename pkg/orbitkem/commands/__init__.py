from orbitkem.commands.registry import CommandRegistry

__all__ = ["CommandRegistry"]

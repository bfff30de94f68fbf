"""Coordination service: stateful sessions, event log, HTTP layer."""

from .store import InProcessBus, PubSub, SessionStore

__all__ = ["InProcessBus", "PubSub", "SessionStore"]

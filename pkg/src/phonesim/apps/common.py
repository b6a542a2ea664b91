"""Helpers shared by the app simulators."""

from __future__ import annotations

from ..database import Store
from ..errors import GuardFailed

DEFAULT_PAGE = 10


def paginate(records: list[dict], offset: int = 0, limit: int = DEFAULT_PAGE) -> list[dict]:
    return records[offset:offset + limit]


def render_records(records: list[dict], fields: tuple[str, ...]) -> str:
    if not records:
        return "(no entries)"
    lines = []
    for rec in records:
        parts = [f"id={rec['id']}"]
        parts += [f"{f}={rec.get(f)!r}" for f in fields if f in rec]
        lines.append(" ".join(parts))
    return "\n".join(lines)


def require_record(store: Store, record_id: str, what: str) -> dict:
    rec = store.get(record_id)
    if rec is None:
        raise GuardFailed(f"no {what} with id {record_id!r}")
    return rec


def by_index(records: list[dict], index: int, what: str) -> dict:
    if index < 0 or index >= len(records):
        raise GuardFailed(f"no {what} at index {index}")
    return records[index]

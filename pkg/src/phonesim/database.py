"""The shared world database: one keyed store per (app, collection).

Records are plain JSON-serializable dicts so snapshots, digests, and replay
comparisons are byte-exact. All mutation flows through tool handlers; nothing
else writes here.
"""

from __future__ import annotations

import copy
import hashlib
import json

from .errors import SeedDataInvalid


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


class Store:
    """A keyed record collection with deterministic id assignment."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.records: dict[str, dict] = {}
        self.counter = 0

    def next_id(self) -> str:
        self.counter += 1
        return f"{self.prefix}{self.counter:03d}"

    def add(self, record: dict, record_id: str | None = None) -> str:
        rid = record_id or record.get("id") or self.next_id()
        if rid in self.records:
            raise SeedDataInvalid(f"duplicate record id {rid!r}")
        record = dict(record)
        record["id"] = rid
        self.records[rid] = record
        return rid

    def get(self, record_id: str) -> dict | None:
        return self.records.get(record_id)

    def remove(self, record_id: str) -> dict | None:
        return self.records.pop(record_id, None)

    def all(self) -> list[dict]:
        return [self.records[k] for k in sorted(self.records)]

    def find(self, **fields) -> list[dict]:
        out = []
        for rec in self.all():
            if all(rec.get(k) == v for k, v in fields.items()):
                out.append(rec)
        return out

    def __len__(self) -> int:
        return len(self.records)

    def to_dict(self) -> dict:
        return {"prefix": self.prefix, "counter": self.counter, "records": self.records}

    @classmethod
    def from_dict(cls, data: dict) -> "Store":
        store = cls(data["prefix"])
        store.counter = data["counter"]
        store.records = {k: dict(v) for k, v in data["records"].items()}
        return store


class WorldDatabase:
    def __init__(self):
        self._stores: dict[str, dict[str, Store]] = {}

    def create_store(self, app_id: str, name: str, prefix: str) -> Store:
        app = self._stores.setdefault(app_id, {})
        if name not in app:
            app[name] = Store(prefix)
        return app[name]

    def store(self, app_id: str, name: str) -> Store:
        return self._stores[app_id][name]

    def has_store(self, app_id: str, name: str) -> bool:
        return name in self._stores.get(app_id, {})

    def app_stores(self, app_id: str) -> dict[str, Store]:
        return self._stores.get(app_id, {})

    def dump(self) -> dict:
        return {
            app: {name: store.to_dict() for name, store in stores.items()}
            for app, stores in self._stores.items()
        }

    def load(self, data: dict) -> None:
        self._stores = {
            app: {name: Store.from_dict(sd) for name, sd in stores.items()}
            for app, stores in data.items()
        }

    def digest(self) -> str:
        return digest(self.dump())

    def copy_app(self, app_id: str) -> dict:
        return copy.deepcopy({n: s.to_dict() for n, s in self._stores.get(app_id, {}).items()})

    def restore_app(self, app_id: str, saved: dict) -> None:
        self._stores[app_id] = {n: Store.from_dict(sd) for n, sd in saved.items()}

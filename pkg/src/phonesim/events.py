"""Events and the delivery queue.

Events carry a tool invocation as payload and fire at a resolved simulated
time. Relative schedules anchor on an already-scheduled event; same-time
events deliver FIFO by insertion sequence.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import CyclicSchedule, UnknownAnchor
from .stochastic import StochasticConfig, noise_arrival_times

EVENT_KINDS = ("environment", "oracle_user", "oracle_agent", "noise", "completion")


@dataclass(frozen=True)
class EventSchedule:
    mode: str                    # "absolute" | "relative"
    at: float | None = None      # seconds since scenario start (absolute)
    anchor: str | None = None    # anchor event id (relative)
    offset: float = 0.0

    def to_dict(self) -> dict:
        return {"mode": self.mode, "at": self.at, "anchor": self.anchor, "offset": self.offset}

    @classmethod
    def absolute(cls, at: float) -> "EventSchedule":
        return cls(mode="absolute", at=float(at))

    @classmethod
    def relative(cls, anchor: str, offset: float) -> "EventSchedule":
        return cls(mode="relative", anchor=anchor, offset=float(offset))

    @classmethod
    def from_dict(cls, data: dict) -> "EventSchedule":
        return cls(
            mode=data["mode"],
            at=data.get("at"),
            anchor=data.get("anchor"),
            offset=float(data.get("offset", 0.0)),
        )


@dataclass
class Event:
    id: str
    kind: str                    # one of EVENT_KINDS
    schedule: EventSchedule
    app: str
    tool: str
    args: dict = field(default_factory=dict)
    notify: str = "both"         # "both" | "user" | "assistant" | "none"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "schedule": self.schedule.to_dict(),
            "app": self.app,
            "tool": self.tool,
            "args": self.args,
            "notify": self.notify,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Event":
        return cls(
            id=data["id"],
            kind=data["kind"],
            schedule=EventSchedule.from_dict(data["schedule"]),
            app=data["app"],
            tool=data["tool"],
            args=dict(data.get("args", {})),
            notify=data.get("notify", "both"),
        )


class EventQueue:
    """Min-heap keyed (resolved time, insertion sequence)."""

    def __init__(self):
        self._heap: list[tuple[float, int, Event]] = []
        self._seq = 0
        self._resolved: dict[str, float] = {}   # event id -> firing time (anchor table)

    def schedule(self, event: Event) -> str:
        if event.schedule.mode == "absolute":
            when = float(event.schedule.at)
        elif event.schedule.mode == "relative":
            anchor = event.schedule.anchor
            if anchor == event.id:
                raise CyclicSchedule(f"event {event.id!r} anchors on itself")
            if anchor not in self._resolved:
                raise UnknownAnchor(f"event {event.id!r} anchors on unscheduled {anchor!r}")
            if event.schedule.offset < 0:
                raise CyclicSchedule(
                    f"event {event.id!r} would fire before its anchor {anchor!r}"
                )
            when = self._resolved[anchor] + event.schedule.offset
        else:
            raise ValueError(f"unknown schedule mode {event.schedule.mode!r}")
        self._resolved[event.id] = when
        heapq.heappush(self._heap, (when, self._seq, event))
        self._seq += 1
        return event.id

    def resolved_time(self, event_id: str) -> float:
        if event_id not in self._resolved:
            raise UnknownAnchor(f"no event {event_id!r} scheduled")
        return self._resolved[event_id]

    def pop_due(self, now: float) -> list[tuple[float, Event]]:
        due = []
        while self._heap and self._heap[0][0] <= now:
            when, _, event = heapq.heappop(self._heap)
            due.append((when, event))
        return due

    def __len__(self) -> int:
        return len(self._heap)

    def to_dict(self) -> dict:
        pending = [
            {"when": when, "seq": seq, "event": ev.to_dict()}
            for when, seq, ev in sorted(self._heap)
        ]
        return {"pending": pending, "seq": self._seq, "resolved": self._resolved}

    @classmethod
    def from_dict(cls, data: dict) -> "EventQueue":
        q = cls()
        q._seq = data["seq"]
        q._resolved = dict(data["resolved"])
        for item in data["pending"]:
            heapq.heappush(q._heap, (item["when"], item["seq"], Event.from_dict(item["event"])))
        return q


def load_distractor_catalog() -> list[dict]:
    text = resources.files("phonesim").joinpath("data/distractors.json").read_text("utf-8")
    return json.loads(text)


def sample_noise_events(
    cfg: StochasticConfig,
    horizon: float,
    allowed_apps: set[str] | None = None,
) -> list[Event]:
    """Poisson-scheduled distractor events, cycled round-robin through the
    catalog entries whose target app is registered in the scenario."""
    times = noise_arrival_times(cfg, horizon)
    if not times:
        return []
    catalog = load_distractor_catalog()
    if allowed_apps is not None:
        catalog = [entry for entry in catalog if entry["app"] in allowed_apps]
    if not catalog:
        return []
    events = []
    for i, t in enumerate(times):
        entry = catalog[i % len(catalog)]
        events.append(
            Event(
                id=f"noise-{i + 1:04d}",
                kind="noise",
                schedule=EventSchedule.absolute(t),
                app=entry["app"],
                tool=entry["tool"],
                args=dict(entry["args"]),
            )
        )
    return events

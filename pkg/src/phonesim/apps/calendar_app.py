"""Calendar app: Agenda, Detail, and a draft-backed Edit screen.

The Edit screen holds a draft in the screen context; save writes the event
(update when editing, create when composing) and returns to the entry screen.
"""

from __future__ import annotations

import json

from ..errors import GuardFailed
from ..fsm import ApiTool, AppStateMachine, Param, ToolContext, ToolSpec, Transition
from .common import by_index, paginate, render_records, require_record

LIST_FIELDS = ("title", "start", "end", "tag")


def _fresh_draft() -> dict:
    return {"title": "", "start": "", "end": "", "tag": "", "description": "",
            "location": "", "attendees": []}


def _add_event(store, title: str, start: str, end: str, tag: str = "",
               description: str = "", location: str = "", attendees: list | None = None) -> str:
    return store.add({
        "title": title, "start": start, "end": end, "tag": tag,
        "description": description, "location": location,
        "attendees": list(attendees or []),
    })


def _open(ctx: ToolContext) -> dict:
    return require_record(ctx.store("events"), ctx.session.get("open_id", ""), "open event")


def _draft(ctx: ToolContext) -> dict:
    draft = ctx.session.get("draft")
    if draft is None:
        raise GuardFailed("no event draft in progress")
    return draft


# -- Agenda -------------------------------------------------------------------

def list_events(ctx: ToolContext) -> str:
    events = paginate(ctx.store("events").all(),
                      ctx.args.get("offset", 0), ctx.args.get("limit", 10))
    return render_records(events, LIST_FIELDS)


def search_events(ctx: ToolContext) -> str:
    query = ctx.args["query"].lower()
    hits = [e for e in ctx.store("events").all()
            if query in e["title"].lower() or query in e["description"].lower()]
    return render_records(hits, LIST_FIELDS)


def open_event(ctx: ToolContext) -> str:
    event = require_record(ctx.store("events"), ctx.args["event_id"], "event")
    ctx.session["open_id"] = event["id"]
    return json.dumps(event, sort_keys=True)


def open_event_by_index(ctx: ToolContext) -> str:
    event = by_index(ctx.store("events").all(), ctx.args["index"], "event")
    ctx.session["open_id"] = event["id"]
    return json.dumps(event, sort_keys=True)


def filter_by_tag(ctx: ToolContext) -> str:
    return render_records(ctx.store("events").find(tag=ctx.args["tag"]), LIST_FIELDS)


def filter_by_attendee(ctx: ToolContext) -> str:
    hits = [e for e in ctx.store("events").all() if ctx.args["attendee"] in e["attendees"]]
    return render_records(hits, LIST_FIELDS)


def add_calendar_event_by_attendee(ctx: ToolContext) -> str:
    rid = _add_event(ctx.store("events"), ctx.args["title"], ctx.args["start"],
                     ctx.args["end"], attendees=[ctx.args["attendee"]])
    return f"event created as {rid}"


def read_today_calendar_events(ctx: ToolContext) -> str:
    today = ctx.clock.wall().strftime("%Y-%m-%d")
    hits = [e for e in ctx.store("events").all() if e["start"].startswith(today)]
    return render_records(hits, LIST_FIELDS)


def get_all_tags(ctx: ToolContext) -> str:
    tags = sorted({e["tag"] for e in ctx.store("events").all() if e["tag"]})
    return ", ".join(tags) or "(no tags)"


def get_calendar_events_by_tag(ctx: ToolContext) -> str:
    return filter_by_tag(ctx)


def set_day(ctx: ToolContext) -> str:
    ctx.session["day"] = ctx.args["day"]
    return f"agenda day set to {ctx.args['day']}"


def start_create_event(ctx: ToolContext) -> str:
    ctx.session["draft"] = _fresh_draft()
    ctx.session["editing_id"] = None
    ctx.session["edit_return"] = "Agenda"
    return "creating a new event"


# -- Detail -------------------------------------------------------------------

def refresh_event(ctx: ToolContext) -> str:
    return json.dumps(_open(ctx), sort_keys=True)


def delete_event(ctx: ToolContext) -> str:
    event = _open(ctx)
    ctx.store("events").remove(event["id"])
    ctx.session["open_id"] = None
    return f"deleted {event['id']}"


def delete_by_attendee(ctx: ToolContext) -> str:
    store = ctx.store("events")
    victims = [e["id"] for e in store.all() if ctx.args["attendee"] in e["attendees"]]
    for rid in victims:
        store.remove(rid)
    ctx.session["open_id"] = None
    return f"deleted {len(victims)} events with attendee {ctx.args['attendee']}"


def list_attendees(ctx: ToolContext) -> str:
    return ", ".join(_open(ctx)["attendees"]) or "(no attendees)"


def edit_event(ctx: ToolContext) -> str:
    event = _open(ctx)
    draft = {k: event[k] for k in _fresh_draft()}
    draft["attendees"] = list(draft["attendees"])
    ctx.session["draft"] = draft
    ctx.session["editing_id"] = event["id"]
    ctx.session["edit_return"] = "Detail"
    return f"editing {event['id']}"


# -- Edit ---------------------------------------------------------------------

def set_title(ctx: ToolContext) -> str:
    _draft(ctx)["title"] = ctx.args["title"]
    return "title set"


def set_time_range(ctx: ToolContext) -> str:
    draft = _draft(ctx)
    draft["start"], draft["end"] = ctx.args["start"], ctx.args["end"]
    return "time range set"


def set_tag(ctx: ToolContext) -> str:
    _draft(ctx)["tag"] = ctx.args["tag"]
    return "tag set"


def set_description(ctx: ToolContext) -> str:
    _draft(ctx)["description"] = ctx.args["description"]
    return "description set"


def set_location(ctx: ToolContext) -> str:
    _draft(ctx)["location"] = ctx.args["location"]
    return "location set"


def set_attendees(ctx: ToolContext) -> str:
    _draft(ctx)["attendees"] = list(ctx.args["attendees"])
    return "attendees set"


def add_attendee(ctx: ToolContext) -> str:
    _draft(ctx)["attendees"].append(ctx.args["attendee"])
    return "attendee added"


def remove_attendee(ctx: ToolContext) -> str:
    draft = _draft(ctx)
    if ctx.args["attendee"] not in draft["attendees"]:
        raise GuardFailed(f"{ctx.args['attendee']!r} is not an attendee")
    draft["attendees"].remove(ctx.args["attendee"])
    return "attendee removed"


def _edit_exit(ctx: ToolContext) -> None:
    ctx.go(ctx.session.get("edit_return") or "Agenda")
    ctx.session["draft"] = None
    ctx.session["editing_id"] = None
    ctx.session["edit_return"] = None


def save(ctx: ToolContext) -> str:
    draft = _draft(ctx)
    editing = ctx.session.get("editing_id")
    if editing:
        event = require_record(ctx.store("events"), editing, "event")
        event.update(draft)
        _edit_exit(ctx)
        ctx.go("Detail")
        ctx.session["open_id"] = editing
        return f"event {editing} updated"
    if not draft["title"] or not draft["start"]:
        raise GuardFailed("draft needs at least a title and a start time")
    rid = _add_event(ctx.store("events"), **draft)
    _edit_exit(ctx)
    return f"event created as {rid}"


def discard(ctx: ToolContext) -> str:
    _edit_exit(ctx)
    return "edit discarded"


# -- flat API -----------------------------------------------------------------

def api_list_events(ctx: ToolContext) -> str:
    return render_records(ctx.store("events").all(), LIST_FIELDS)


def api_read_event(ctx: ToolContext) -> str:
    return json.dumps(require_record(ctx.store("events"), ctx.args["event_id"], "event"),
                      sort_keys=True)


def api_read_today_events(ctx: ToolContext) -> str:
    return read_today_calendar_events(ctx)


def api_get_events_by_tag(ctx: ToolContext) -> str:
    return filter_by_tag(ctx)


def api_add_event(ctx: ToolContext) -> str:
    rid = _add_event(ctx.store("events"), ctx.args["title"], ctx.args["start"], ctx.args["end"],
                     tag=ctx.args.get("tag", ""), description=ctx.args.get("description", ""),
                     location=ctx.args.get("location", ""), attendees=ctx.args.get("attendees"))
    return f"event created as {rid}"


def api_delete_event(ctx: ToolContext) -> str:
    require_record(ctx.store("events"), ctx.args["event_id"], "event")
    ctx.store("events").remove(ctx.args["event_id"])
    return f"deleted {ctx.args['event_id']}"


PAGING = (Param("offset", "int", required=False), Param("limit", "int", required=False))


def build() -> AppStateMachine:
    t = Transition
    transitions = (
        t("Agenda", ToolSpec("list_events", PAGING, read_only=True,
                             description="List calendar events."), list_events),
        t("Agenda", ToolSpec("search_events", (Param("query"),), read_only=True,
                             description="Search events by title or description."), search_events),
        t("Agenda", ToolSpec("open_event", (Param("event_id"),),
                             description="Open an event."), open_event, ("Detail",)),
        t("Agenda", ToolSpec("open_event_by_index", (Param("index", "int"),),
                             description="Open the n-th event."), open_event_by_index, ("Detail",)),
        t("Agenda", ToolSpec("filter_by_tag", (Param("tag"),), read_only=True,
                             description="List events with a tag."), filter_by_tag),
        t("Agenda", ToolSpec("filter_by_attendee", (Param("attendee"),), read_only=True,
                             description="List events with an attendee."), filter_by_attendee),
        t("Agenda", ToolSpec("add_calendar_event_by_attendee",
                             (Param("title"), Param("start"), Param("end"), Param("attendee")),
                             description="Quick-create an event with one attendee."),
          add_calendar_event_by_attendee),
        t("Agenda", ToolSpec("read_today_calendar_events", (), read_only=True,
                             description="List today's events."), read_today_calendar_events),
        t("Agenda", ToolSpec("get_all_tags", (), read_only=True,
                             description="List all tags in use."), get_all_tags),
        t("Agenda", ToolSpec("get_calendar_events_by_tag", (Param("tag"),), read_only=True,
                             description="List events with a tag."), get_calendar_events_by_tag),
        t("Agenda", ToolSpec("set_day", (Param("day"),),
                             description="Set the agenda day."), set_day),
        t("Agenda", ToolSpec("start_create_event", (),
                             description="Start creating an event."), start_create_event, ("Edit",)),
        t("Detail", ToolSpec("refresh_event", (), read_only=True,
                             description="Re-read the open event."), refresh_event),
        t("Detail", ToolSpec("delete_event", (),
                             description="Delete the open event."), delete_event, ("Agenda",)),
        t("Detail", ToolSpec("delete_by_attendee", (Param("attendee"),),
                             description="Delete all events with an attendee."),
          delete_by_attendee, ("Agenda",)),
        t("Detail", ToolSpec("list_attendees", (), read_only=True,
                             description="List the open event's attendees."), list_attendees),
        t("Detail", ToolSpec("edit_event", (),
                             description="Edit the open event."), edit_event, ("Edit",)),
        t("Edit", ToolSpec("set_title", (Param("title"),), description="Set the title."), set_title),
        t("Edit", ToolSpec("set_time_range", (Param("start"), Param("end")),
                           description="Set start and end times."), set_time_range),
        t("Edit", ToolSpec("set_tag", (Param("tag"),), description="Set the tag."), set_tag),
        t("Edit", ToolSpec("set_description", (Param("description"),),
                           description="Set the description."), set_description),
        t("Edit", ToolSpec("set_location", (Param("location"),),
                           description="Set the location."), set_location),
        t("Edit", ToolSpec("set_attendees", (Param("attendees", "list"),),
                           description="Set the attendee list."), set_attendees),
        t("Edit", ToolSpec("add_attendee", (Param("attendee"),),
                           description="Add an attendee."), add_attendee),
        t("Edit", ToolSpec("remove_attendee", (Param("attendee"),),
                           description="Remove an attendee."), remove_attendee),
        t("Edit", ToolSpec("save", (), description="Save the draft event."),
          save, ("Agenda", "Detail")),
        t("Edit", ToolSpec("discard", (), description="Discard the draft."),
          discard, ("Agenda", "Detail")),
    )
    api = (
        ApiTool(ToolSpec("list_events", (), read_only=True,
                         description="List all calendar events."), api_list_events),
        ApiTool(ToolSpec("read_event", (Param("event_id"),), read_only=True,
                         description="Read a full event."), api_read_event),
        ApiTool(ToolSpec("read_today_events", (), read_only=True,
                         description="List today's events."), api_read_today_events),
        ApiTool(ToolSpec("get_events_by_tag", (Param("tag"),), read_only=True,
                         description="List events with a tag."), api_get_events_by_tag),
        ApiTool(ToolSpec("add_event",
                         (Param("title"), Param("start"), Param("end"),
                          Param("tag", required=False), Param("description", required=False),
                          Param("location", required=False),
                          Param("attendees", "list", required=False)),
                         description="Create a calendar event."), api_add_event),
        ApiTool(ToolSpec("delete_event", (Param("event_id"),),
                         description="Delete a calendar event."), api_delete_event),
    )
    return AppStateMachine(
        app_id="CalendarApp",
        states=("Agenda", "Detail", "Edit"),
        initial_state="Agenda",
        transitions=transitions,
        api_tools=api,
        stores=(("events", "CE"),),
        description="Scheduling",
    )

"""Note app: Folders, List, Detail, Edit. List is the root screen; Folders
shows the folder index and drops back into List scoped to the chosen folder."""

from __future__ import annotations

import json

from ..errors import GuardFailed
from ..fsm import ApiTool, AppStateMachine, Param, ToolContext, ToolSpec, Transition
from .common import paginate, render_records, require_record

LIST_FIELDS = ("title", "folder")
DEFAULT_FOLDER = "Notes"


def _fresh_draft() -> dict:
    return {"title": "", "content": ""}


def _open(ctx: ToolContext) -> dict:
    return require_record(ctx.store("notes"), ctx.session.get("open_id", ""), "open note")


def _draft(ctx: ToolContext) -> dict:
    draft = ctx.session.get("draft")
    if draft is None:
        raise GuardFailed("no note draft in progress")
    return draft


def _create_note(store, title: str, content: str, folder: str = DEFAULT_FOLDER) -> str:
    return store.add({"title": title, "content": content, "folder": folder, "attachments": []})


def list_notes(ctx: ToolContext) -> str:
    folder = ctx.session.get("folder", DEFAULT_FOLDER)
    notes = paginate(ctx.store("notes").find(folder=folder),
                     ctx.args.get("offset", 0), ctx.args.get("limit", 10))
    return f"folder={folder}\n" + render_records(notes, LIST_FIELDS)


def search_notes(ctx: ToolContext) -> str:
    query = ctx.args["query"].lower()
    hits = [n for n in ctx.store("notes").all()
            if query in n["title"].lower() or query in n["content"].lower()]
    return render_records(hits, LIST_FIELDS)


def open_note(ctx: ToolContext) -> str:
    note = require_record(ctx.store("notes"), ctx.args["note_id"], "note")
    ctx.session["open_id"] = note["id"]
    return json.dumps(note, sort_keys=True)


def new_note(ctx: ToolContext) -> str:
    ctx.session["draft"] = _fresh_draft()
    ctx.session["editing_id"] = None
    return "creating a new note"


def list_folders(ctx: ToolContext) -> str:
    folders = sorted({n["folder"] for n in ctx.store("notes").all()} | {DEFAULT_FOLDER})
    return "\n".join(folders)


def open_folder(ctx: ToolContext) -> str:
    ctx.session["folder"] = ctx.args["folder"]
    return f"opened folder {ctx.args['folder']}"


def refresh_note(ctx: ToolContext) -> str:
    return json.dumps(_open(ctx), sort_keys=True)


def list_attachments(ctx: ToolContext) -> str:
    return ", ".join(_open(ctx)["attachments"]) or "(no attachments)"


def add_attachment(ctx: ToolContext) -> str:
    _open(ctx)["attachments"].append(ctx.args["filename"])
    return "attachment added"


def remove_attachment(ctx: ToolContext) -> str:
    note = _open(ctx)
    if ctx.args["filename"] not in note["attachments"]:
        raise GuardFailed(f"no attachment {ctx.args['filename']!r}")
    note["attachments"].remove(ctx.args["filename"])
    return "attachment removed"


def delete_note(ctx: ToolContext) -> str:
    note = _open(ctx)
    ctx.store("notes").remove(note["id"])
    ctx.session["open_id"] = None
    return f"deleted {note['id']}"


def edit_note(ctx: ToolContext) -> str:
    note = _open(ctx)
    ctx.session["draft"] = {"title": note["title"], "content": note["content"]}
    ctx.session["editing_id"] = note["id"]
    return f"editing {note['id']}"


def duplicate_note(ctx: ToolContext) -> str:
    note = _open(ctx)
    rid = _create_note(ctx.store("notes"), note["title"] + " (copy)", note["content"],
                       note["folder"])
    return f"duplicated as {rid}"


def move_note(ctx: ToolContext) -> str:
    note = _open(ctx)
    note["folder"] = ctx.args["folder"]
    return f"moved {note['id']} to folder {ctx.args['folder']}"


def set_title(ctx: ToolContext) -> str:
    _draft(ctx)["title"] = ctx.args["title"]
    return "title set"


def set_content(ctx: ToolContext) -> str:
    _draft(ctx)["content"] = ctx.args["content"]
    return "content set"


def update_note(ctx: ToolContext) -> str:
    draft = _draft(ctx)
    editing = ctx.session.get("editing_id")
    store = ctx.store("notes")
    if editing:
        note = require_record(store, editing, "note")
        note["title"], note["content"] = draft["title"], draft["content"]
        rid = editing
    else:
        if not draft["title"]:
            raise GuardFailed("note draft needs a title")
        rid = _create_note(store, draft["title"], draft["content"],
                           ctx.session.get("folder", DEFAULT_FOLDER))
    ctx.session["draft"] = None
    ctx.session["editing_id"] = None
    ctx.session["open_id"] = rid
    return f"note {rid} saved"


def api_list_notes(ctx: ToolContext) -> str:
    return render_records(ctx.store("notes").all(), LIST_FIELDS)


def api_read_note(ctx: ToolContext) -> str:
    return json.dumps(require_record(ctx.store("notes"), ctx.args["note_id"], "note"),
                      sort_keys=True)


def api_create_note(ctx: ToolContext) -> str:
    rid = _create_note(ctx.store("notes"), ctx.args["title"], ctx.args["content"],
                       ctx.args.get("folder", DEFAULT_FOLDER))
    return f"note created as {rid}"


def api_update_note(ctx: ToolContext) -> str:
    note = require_record(ctx.store("notes"), ctx.args["note_id"], "note")
    for field in ("title", "content", "folder"):
        if field in ctx.args:
            note[field] = ctx.args[field]
    return f"note {note['id']} updated"


def api_delete_note(ctx: ToolContext) -> str:
    require_record(ctx.store("notes"), ctx.args["note_id"], "note")
    ctx.store("notes").remove(ctx.args["note_id"])
    return f"deleted {ctx.args['note_id']}"


PAGING = (Param("offset", "int", required=False), Param("limit", "int", required=False))


def build() -> AppStateMachine:
    t = Transition
    transitions = (
        t("List", ToolSpec("list_notes", PAGING, read_only=True,
                           description="List notes in the current folder."), list_notes),
        t("List", ToolSpec("search_notes", (Param("query"),), read_only=True,
                           description="Search notes by title or content."), search_notes),
        t("List", ToolSpec("open_note", (Param("note_id"),),
                           description="Open a note."), open_note, ("Detail",)),
        t("List", ToolSpec("new_note", (), description="Start a new note."), new_note, ("Edit",)),
        t("List", ToolSpec("list_folders", (), description="Browse folders."),
          list_folders, ("Folders",)),
        t("Folders", ToolSpec("open_folder", (Param("folder"),),
                              description="Open a folder."), open_folder, ("List",)),
        t("Detail", ToolSpec("refresh_note", (), read_only=True,
                             description="Re-read the open note."), refresh_note),
        t("Detail", ToolSpec("list_attachments", (), read_only=True,
                             description="List attachments."), list_attachments),
        t("Detail", ToolSpec("add_attachment", (Param("filename"),),
                             description="Attach a file."), add_attachment),
        t("Detail", ToolSpec("remove_attachment", (Param("filename"),),
                             description="Remove an attachment."), remove_attachment),
        t("Detail", ToolSpec("delete_note", (), description="Delete the open note."),
          delete_note, ("List",)),
        t("Detail", ToolSpec("edit_note", (), description="Edit the open note."),
          edit_note, ("Edit",)),
        t("Detail", ToolSpec("duplicate_note", (), description="Duplicate the open note."),
          duplicate_note),
        t("Detail", ToolSpec("move_note", (Param("folder"),),
                             description="Move the open note to another folder."), move_note),
        t("Edit", ToolSpec("set_title", (Param("title"),), description="Set the title."), set_title),
        t("Edit", ToolSpec("set_content", (Param("content"),),
                           description="Set the content."), set_content),
        t("Edit", ToolSpec("update_note", (), description="Save the note."),
          update_note, ("Detail",)),
    )
    api = (
        ApiTool(ToolSpec("list_notes", (), read_only=True,
                         description="List all notes."), api_list_notes),
        ApiTool(ToolSpec("read_note", (Param("note_id"),), read_only=True,
                         description="Read a note."), api_read_note),
        ApiTool(ToolSpec("list_folders", (), read_only=True,
                         description="List folders."), list_folders),
        ApiTool(ToolSpec("create_note",
                         (Param("title"), Param("content"), Param("folder", required=False)),
                         description="Create a note."), api_create_note),
        ApiTool(ToolSpec("update_note",
                         (Param("note_id"), Param("title", required=False),
                          Param("content", required=False), Param("folder", required=False)),
                         description="Update a note."), api_update_note),
        ApiTool(ToolSpec("delete_note", (Param("note_id"),),
                         description="Delete a note."), api_delete_note),
    )
    return AppStateMachine(
        app_id="NoteApp",
        states=("Folders", "List", "Detail", "Edit"),
        initial_state="List",
        transitions=transitions,
        api_tools=api,
        stores=(("notes", "N"),),
        description="Note-taking",
    )

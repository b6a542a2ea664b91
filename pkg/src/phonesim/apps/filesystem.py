"""FileSystem app: flat read/write/list of named text blobs on one screen."""

from __future__ import annotations

from ..errors import GuardFailed
from ..fsm import ApiTool, AppStateMachine, Param, ToolContext, ToolSpec, Transition


def list_files(ctx: ToolContext) -> str:
    names = sorted(f["name"] for f in ctx.store("files").all())
    return "\n".join(names) or "(no files)"


def read_file(ctx: ToolContext) -> str:
    hits = ctx.store("files").find(name=ctx.args["name"])
    if not hits:
        raise GuardFailed(f"no file named {ctx.args['name']!r}")
    return hits[0]["content"]


def write_file(ctx: ToolContext) -> str:
    store = ctx.store("files")
    hits = store.find(name=ctx.args["name"])
    if hits:
        hits[0]["content"] = ctx.args["content"]
        return f"updated {ctx.args['name']}"
    store.add({"name": ctx.args["name"], "content": ctx.args["content"]})
    return f"created {ctx.args['name']}"


TOOLS = (
    (ToolSpec("list_files", (), read_only=True, description="List file names."), list_files),
    (ToolSpec("read_file", (Param("name"),), read_only=True,
              description="Read a file's content."), read_file),
    (ToolSpec("write_file", (Param("name"), Param("content")),
              description="Create or overwrite a file."), write_file),
)


def build() -> AppStateMachine:
    transitions = tuple(Transition("Files", spec, handler) for spec, handler in TOOLS)
    api = tuple(ApiTool(spec, handler) for spec, handler in TOOLS)
    return AppStateMachine(
        app_id="FileSystemApp",
        states=("Files",),
        initial_state="Files",
        transitions=transitions,
        api_tools=api,
        stores=(("files", "F"),),
        description="File access",
    )

"""Apartment app: Home, Search, Saved, Detail. The saved list keeps a copy of
the listing record keyed by the same id so validation can query it directly.
Detail has no back transition; exits go through system navigation."""

from __future__ import annotations

import json

from ..errors import GuardFailed
from ..fsm import ApiTool, AppStateMachine, Param, ToolContext, ToolSpec, Transition
from .common import paginate, render_records, require_record

LIST_FIELDS = ("name", "location", "rent", "bedrooms")


def _save(db, apartment_id: str) -> str:
    listing = db.store("ApartmentApp", "apartments").get(apartment_id)
    if listing is None:
        raise GuardFailed(f"no apartment with id {apartment_id!r}")
    saved = db.store("ApartmentApp", "saved")
    if saved.get(apartment_id) is not None:
        return f"{apartment_id} is already saved"
    saved.add(dict(listing), record_id=apartment_id)
    return f"saved {apartment_id}"


def _unsave(db, apartment_id: str) -> str:
    if db.store("ApartmentApp", "saved").remove(apartment_id) is None:
        raise GuardFailed(f"{apartment_id!r} is not in the saved list")
    return f"removed {apartment_id} from saved"


def list_apartments(ctx: ToolContext) -> str:
    listings = paginate(ctx.store("apartments").all(),
                        ctx.args.get("offset", 0), ctx.args.get("limit", 10))
    return render_records(listings, LIST_FIELDS)


def view_apartment(ctx: ToolContext) -> str:
    listing = require_record(ctx.store("apartments"), ctx.args["apartment_id"], "apartment")
    ctx.session["open_id"] = listing["id"]
    return json.dumps(listing, sort_keys=True)


def search(ctx: ToolContext) -> str:
    hits = []
    for listing in ctx.store("apartments").all():
        if "location" in ctx.args and ctx.args["location"].lower() not in listing["location"].lower():
            continue
        if "max_rent" in ctx.args and listing["rent"] > ctx.args["max_rent"]:
            continue
        if "min_rent" in ctx.args and listing["rent"] < ctx.args["min_rent"]:
            continue
        if "bedrooms" in ctx.args and listing["bedrooms"] != ctx.args["bedrooms"]:
            continue
        hits.append(listing)
    return render_records(hits, LIST_FIELDS)


def list_saved(ctx: ToolContext) -> str:
    return render_records(ctx.store("saved").all(), LIST_FIELDS)


def save(ctx: ToolContext) -> str:
    apartment_id = ctx.session.get("open_id")
    if not apartment_id:
        raise GuardFailed("no open apartment")
    return _save(ctx.db, apartment_id)


def unsave(ctx: ToolContext) -> str:
    apartment_id = ctx.session.get("open_id")
    if not apartment_id:
        raise GuardFailed("no open apartment")
    return _unsave(ctx.db, apartment_id)


def api_list_apartments(ctx: ToolContext) -> str:
    return render_records(ctx.store("apartments").all(), LIST_FIELDS)


def api_get_apartment(ctx: ToolContext) -> str:
    return json.dumps(require_record(ctx.store("apartments"), ctx.args["apartment_id"],
                                     "apartment"), sort_keys=True)


def api_list_saved(ctx: ToolContext) -> str:
    return render_records(ctx.store("saved").all(), LIST_FIELDS)


def api_save(ctx: ToolContext) -> str:
    return _save(ctx.db, ctx.args["apartment_id"])


def api_unsave(ctx: ToolContext) -> str:
    return _unsave(ctx.db, ctx.args["apartment_id"])


PAGING = (Param("offset", "int", required=False), Param("limit", "int", required=False))
SEARCH_PARAMS = (Param("location", required=False), Param("min_rent", "int", required=False),
                 Param("max_rent", "int", required=False), Param("bedrooms", "int", required=False))


def build() -> AppStateMachine:
    t = Transition
    transitions = (
        t("Home", ToolSpec("list_apartments", PAGING, read_only=True,
                           description="List apartment listings."), list_apartments),
        t("Home", ToolSpec("view_apartment", (Param("apartment_id"),),
                           description="Open a listing."), view_apartment, ("Detail",)),
        t("Home", ToolSpec("open_search", (), description="Open the search screen."),
          lambda ctx: "search opened", ("Search",)),
        t("Home", ToolSpec("open_favorites", (), description="Open the saved list."),
          lambda ctx: "favorites opened", ("Saved",)),
        t("Search", ToolSpec("search", SEARCH_PARAMS, read_only=True,
                             description="Filter listings by criteria."), search),
        t("Search", ToolSpec("view_apartment", (Param("apartment_id"),),
                             description="Open a listing."), view_apartment, ("Detail",)),
        t("Saved", ToolSpec("list_saved", (), read_only=True,
                            description="List saved apartments."), list_saved),
        t("Saved", ToolSpec("view_apartment", (Param("apartment_id"),),
                            description="Open a saved listing."), view_apartment, ("Detail",)),
        t("Detail", ToolSpec("save", (), description="Save the open listing."), save),
        t("Detail", ToolSpec("unsave", (), description="Remove the open listing from saved."),
          unsave),
    )
    api = (
        ApiTool(ToolSpec("list_apartments", (), read_only=True,
                         description="List all listings."), api_list_apartments),
        ApiTool(ToolSpec("get_apartment", (Param("apartment_id"),), read_only=True,
                         description="Read a listing."), api_get_apartment),
        ApiTool(ToolSpec("search_apartments", SEARCH_PARAMS, read_only=True,
                         description="Filter listings."), search),
        ApiTool(ToolSpec("list_saved", (), read_only=True,
                         description="List saved apartments."), api_list_saved),
        ApiTool(ToolSpec("save_apartment", (Param("apartment_id"),),
                         description="Save a listing."), api_save),
        ApiTool(ToolSpec("unsave_apartment", (Param("apartment_id"),),
                         description="Remove a listing from saved."), api_unsave),
    )
    return AppStateMachine(
        app_id="ApartmentApp",
        states=("Home", "Search", "Saved", "Detail"),
        initial_state="Home",
        transitions=transitions,
        api_tools=api,
        stores=(("apartments", "A"), ("saved", "SV")),
        description="Listing search",
    )

import pytest

from phonesim.errors import ArgumentInvalid, InvalidMachine, UnknownState
from phonesim.fsm import (
    AppStateMachine,
    Param,
    ToolSpec,
    Transition,
    require_valid,
    validate_state_machine,
)


def noop_handler(ctx):
    return "ok"


def machine(states, initial, transitions):
    return AppStateMachine(app_id="TestApp", states=states, initial_state=initial,
                           transitions=tuple(transitions))


def test_arg_validation_types_and_required():
    spec = ToolSpec("t", (Param("n", "int"), Param("q", required=False)))
    assert spec.validate_args({"n": 3}) == {"n": 3}
    with pytest.raises(ArgumentInvalid):
        spec.validate_args({})                   # missing required
    with pytest.raises(ArgumentInvalid):
        spec.validate_args({"n": "3"})           # wrong type
    with pytest.raises(ArgumentInvalid):
        spec.validate_args({"n": True})          # bool is not an int here
    with pytest.raises(ArgumentInvalid):
        spec.validate_args({"n": 3, "zz": 1})    # unexpected arg


def test_unreachable_state_is_an_error():
    m = machine(("A", "B", "C"), "A",
                [Transition("A", ToolSpec("go"), noop_handler, ("B",))])
    report = validate_state_machine(m)
    assert not report["valid"]
    assert report["unreachable"] == ["C"]
    with pytest.raises(InvalidMachine):
        require_valid(m)


def test_duplicate_state_tool_pair_is_an_error():
    m = machine(("A",), "A",
                [Transition("A", ToolSpec("go"), noop_handler),
                 Transition("A", ToolSpec("go"), noop_handler)])
    assert any("duplicate" in e for e in validate_state_machine(m)["errors"])


def test_dead_end_state_is_a_warning_not_error():
    m = machine(("A", "B"), "A",
                [Transition("A", ToolSpec("go"), noop_handler, ("B",)),
                 Transition("B", ToolSpec("look", read_only=True), noop_handler)])
    report = validate_state_machine(m)
    assert report["valid"]
    assert report["dead_ends"] == ["B"]


def test_undefined_target_is_an_error():
    m = machine(("A",), "A",
                [Transition("A", ToolSpec("go"), noop_handler, ("Ghost",))])
    assert not validate_state_machine(m)["valid"]


def test_user_tools_are_state_scoped():
    m = machine(("A", "B"), "A",
                [Transition("A", ToolSpec("go"), noop_handler, ("B",)),
                 Transition("B", ToolSpec("back"), noop_handler, ("A",))])
    assert [t.name for t in m.user_tools("A")] == ["go"]
    assert m.transition("A", "back") is None
    with pytest.raises(UnknownState):
        m.user_tools("Ghost")

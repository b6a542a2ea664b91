"""The turn loop: user first, then the assistant, under per-phase budgets.

Each turn: deliver due events, give the user their single action, then run
the assistant phase that its current mode allows. While a proposal awaits
the user's decision, the assistant does nothing. In execute mode the
assistant works until it reports back to the user or runs out of steps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    EpisodeFinished,
    MalformedAction,
    PayloadToolMissing,
    PhonesimError,
    ProposalAlreadyPending,
)
from .policies import Policy
from .react import Step, parse_step
from .world import World

WAIT = "AgentUserInterface__wait"
PROPOSE = "AgentUserInterface__propose_task"
REPORT = "AgentUserInterface__send_message_to_user"


@dataclass(frozen=True)
class TurnBudget:
    user_iters: int = 1
    observe_iters: int = 5
    execute_iters: int = 10
    max_turns: int = 10


class Episode:
    def __init__(self, world: World, user_policy: Policy, assistant_policy: Policy,
                 budget: TurnBudget | None = None, retry_limit: int = 2):
        self.world = world
        self.user_policy = user_policy
        self.assistant_policy = assistant_policy
        self.budget = budget or TurnBudget()
        self.retry_limit = retry_limit
        self.steps: list[dict] = []        # every policy step, both actors
        self.view_trace: list[dict] = []   # what each side was shown, per phase
        self.rewards: list[dict] = []      # proposal outcomes as step rewards
        self.finished = False
        self.aborted_reason: str | None = None
        self._last_user_feedback: str | None = None
        self._last_agent_feedback: str | None = None

    # ------------------------------------------------------------------

    def run(self) -> dict:
        while not self.finished:
            self.run_turn()
        return self.summary()

    def run_turn(self) -> None:
        if self.finished:
            raise EpisodeFinished("episode already finished")
        world = self.world
        world.turn += 1
        try:
            world.resolve_due_events()
        except PayloadToolMissing as exc:
            self._abort(f"bad event payload: {exc}")
            return
        self._user_phase()
        if world.assistant_mode == "observe":
            self._assistant_phase("observe", self.budget.observe_iters)
        elif world.assistant_mode == "execute":
            self._assistant_phase("execute", self.budget.execute_iters)
        # awaiting_confirmation: the assistant holds still until the user decides
        if world.completed or world.turn >= self.budget.max_turns:
            world.proposals.finalize(world.turn)
            self.finished = True

    # ------------------------------------------------------------------

    def _user_phase(self) -> None:
        world = self.world
        for _ in range(self.budget.user_iters):
            view = world.compose_user_view()
            self.view_trace.append({
                "turn": world.turn,
                "phase": "user",
                "notifications": list(view.notifications),
                "pending_proposal": view.pending_proposal,
                "tool_names": list(view.tool_names),
            })
            step = self._policy_step(self.user_policy, view,
                                     self._last_user_feedback, actor="user")
            if step is None:
                continue
            observation = self._run_user_action(step)
            self._last_user_feedback = observation
            self._record(actor="user", phase="user", step=step,
                         observation=observation)

    def _run_user_action(self, step: Step) -> str:
        world = self.world
        try:
            outcome = world.invoke_user_tool(step.action, step.action_input)
        except PhonesimError as exc:
            return f"Error: {exc}"
        if step.action.endswith("__accept_proposal"):
            self._reward(+1, "proposal accepted")
        elif step.action.endswith("__reject_proposal"):
            self._reward(-1, "proposal rejected")
        return outcome

    # ------------------------------------------------------------------

    def _assistant_phase(self, mode: str, iterations: int) -> None:
        world = self.world
        for i in range(iterations):
            view = world.compose_agent_view()
            self.view_trace.append({
                "turn": world.turn,
                "phase": f"assistant-{mode}",
                "notifications": list(view.notifications),
                "user_actions": list(view.user_actions),
            })
            step = self._policy_step(self.assistant_policy, view,
                                     self._last_agent_feedback, actor="assistant")
            if step is None:
                continue
            observation, phase_over = self._run_agent_action(step, mode)
            self._last_agent_feedback = observation
            self._record(actor="assistant", phase=f"assistant-{mode}", step=step,
                         observation=observation)
            if phase_over or world.assistant_mode != mode:
                return
        if mode == "execute":
            # Out of steps without reporting back: the task ends incomplete.
            world.assistant_mode = "observe"
            world.active_task = None
            world.notifications.message_user(
                "The assistant ran out of steps before finishing the task.")

    def _run_agent_action(self, step: Step, mode: str) -> tuple[str, bool]:
        world = self.world
        if step.action == WAIT or step.action == "noop":
            return "waiting", True
        if step.action == PROPOSE:
            if mode != "observe":
                return "Error: proposals can only be made while observing", False
            task = step.action_input.get("task", "")
            if not task:
                return "Error: propose_task requires a non-empty 'task'", False
            try:
                world.post_proposal(task)
            except ProposalAlreadyPending as exc:
                return f"Error: {exc}", False
            return "proposal sent to the user", True
        if step.action == REPORT:
            if mode != "execute":
                return "Error: send_message_to_user is only available while executing", False
            message = step.action_input.get("message", "")
            world.notifications.message_user(f"Assistant: {message}")
            world.assistant_mode = "observe"
            world.active_task = None
            return "message delivered; task closed", True
        try:
            return world.invoke_agent_tool(step.action, step.action_input, mode=mode), False
        except PhonesimError as exc:
            return f"Error: {exc}", False

    # ------------------------------------------------------------------

    def _policy_step(self, policy: Policy, view, feedback: str | None,
                     actor: str) -> Step | None:
        for attempt in range(self.retry_limit + 1):
            raw = policy.act(view, feedback)
            try:
                return parse_step(raw)
            except MalformedAction as exc:
                feedback = f"Error: {exc}"
                self.steps.append({
                    "turn": self.world.turn,
                    "actor": actor,
                    "phase": "parse-error",
                    "raw": raw,
                    "action": None,
                    "observation": feedback,
                })
        return None

    def _record(self, actor: str, phase: str, step: Step, observation: str) -> None:
        self.steps.append({
            "turn": self.world.turn,
            "actor": actor,
            "phase": phase,
            "thought": step.thought,
            "action": step.action,
            "action_input": step.action_input,
            "observation": observation,
        })

    def _reward(self, value: int, reason: str) -> None:
        self.rewards.append({"turn": self.world.turn, "reward": value, "reason": reason})

    def _abort(self, reason: str) -> None:
        self.aborted_reason = reason
        self.world.proposals.finalize(self.world.turn)
        self.finished = True

    # ------------------------------------------------------------------

    def summary(self) -> dict:
        world = self.world
        return {
            "turns_used": world.turn,
            "completed": world.completed,
            "aborted_reason": self.aborted_reason,
            "proposals": [p.to_dict() for p in world.proposals.proposals],
            "read_actions_observe": world.read_actions_observe,
            "read_actions_total": world.read_actions_total,
            "rewards": list(self.rewards),
        }

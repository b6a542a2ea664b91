"""Report rendering: machine-readable JSON, an aligned text table, and an
optional per-cell CSV for external plotting."""

from __future__ import annotations

import csv
import io
import json


def _fmt(value, stderr=None, digits=3) -> str:
    if value is None:
        return "undef"
    text = f"{value:.{digits}f}"
    if stderr is not None:
        text += f" ± {stderr:.{digits}f}"
    return text


def render_table(report: dict) -> str:
    grouping = report["grouping"]
    headers = list(grouping) + [
        "runs", "success", "succ@k", "succ^k", "prop_rate",
        "accept_rate", "reads(total)", "reads(observe)",
        "accept/reject/gather/trunc",
    ]
    rows = []
    for cell in report["cells"]:
        out = cell["outcomes"]["ternary"]
        rows.append([str(cell["cell"].get(g)) for g in grouping] + [
            str(cell["runs"]),
            _fmt(cell["success_rate"], cell["success_rate_stderr"]),
            _fmt(cell["success_at_k"]),
            _fmt(cell["success_pow_k"]),
            _fmt(cell["proposal_rate"], cell["proposal_rate_stderr"]),
            _fmt(cell["acceptance_rate"], cell["acceptance_rate_stderr"]),
            _fmt(cell["read_actions_mean"], cell["read_actions_stderr"], 1),
            _fmt(cell["read_actions_observe_mean"], None, 1),
            "/".join(str(out[k]) for k in ("accept", "reject", "gather_context", "truncated")),
        ])
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)),
             "  ".join("-" * w for w in widths)]
    lines.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in rows)
    return "\n".join(lines) + "\n"


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def render_csv(report: dict) -> str:
    grouping = report["grouping"]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(grouping + [
        "runs", "success_rate", "success_rate_stderr", "success_at_k",
        "success_pow_k", "proposal_rate", "proposal_rate_stderr",
        "acceptance_rate", "acceptance_rate_stderr",
        "read_actions_mean", "read_actions_stderr", "read_actions_observe_mean",
        "accept", "reject", "gather_context", "truncated",
    ])
    for cell in report["cells"]:
        out = cell["outcomes"]["ternary"]
        writer.writerow([cell["cell"].get(g) for g in grouping] + [
            cell["runs"], cell["success_rate"], cell["success_rate_stderr"],
            cell["success_at_k"], cell["success_pow_k"],
            cell["proposal_rate"], cell["proposal_rate_stderr"],
            cell["acceptance_rate"], cell["acceptance_rate_stderr"],
            cell["read_actions_mean"], cell["read_actions_stderr"],
            cell["read_actions_observe_mean"],
            out["accept"], out["reject"], out["gather_context"], out["truncated"],
        ])
    return buf.getvalue()

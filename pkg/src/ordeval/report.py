"""SVG and plain-text rendering of profiles, rankings and classifications.

Profile plots put one row per attribute value, highest value on top. The
downward bar of a row grows left from the centre line, the upward bar grows
right, and each bar carries a box-and-whiskers glyph of its permutation null
just above it. Every coordinate is written with 6 decimals so the markup is
byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from .engine import Direction, ReinforcementCell, ReinforcementProfile
from .kano import KanoCategory, KanoClassification, category_phrase
from .relieff import AttributeScore

SIGNIFICANT_CLASS = "significant"

# text report column widths, in characters
COLUMNS = (
    ("value", 7),
    ("dir", 6),
    ("prob", 8),
    ("success", 8),
    ("events", 7),
    ("null 95% interval", 19),
    ("sig", 4),
)


@dataclass(frozen=True)
class PlotOptions:
    axis_length: float = 240.0  # pixels for probability 1 on each side
    row_height: float = 40.0
    bar_height: float = 14.0
    margin: float = 40.0
    label_width: float = 60.0
    font_size: float = 11.0
    up_color: str = "#4477aa"
    down_color: str = "#cc6677"
    highlight: str = "#222222"


def fmt(x: float) -> str:
    return f"{x:.6f}"


def _attrs(**kv) -> str:
    parts = []
    for k, v in kv.items():
        if v is None:
            continue
        if isinstance(v, float):
            v = fmt(v)
        parts.append(f"{k.rstrip('_').replace('_', '-')}={quoteattr(str(v))}")
    return " ".join(parts)


def _el(tag: str, **kv) -> str:
    return f"<{tag} {_attrs(**kv)}/>"


def _text(x: float, y: float, s: str, anchor: str = "start", size: float = 11.0, **kv) -> str:
    return f"<text {_attrs(x=x, y=y, font_size=size, text_anchor=anchor, **kv)}>{escape(s)}</text>"


def _document(width: float, height: float, title: str, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{fmt(width)}" height="{fmt(height)}" viewBox="0 0 {fmt(width)} {fmt(height)}" '
        'font-family="sans-serif">\n'
        f"<title>{escape(title)}</title>\n"
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _legend(x: float, y: float, entries: list[tuple[str, dict]], size: float) -> list[str]:
    out = ['<g class="legend">']
    for i, (label, style) in enumerate(entries):
        yy = y + i * (size + 6)
        out.append(_el("rect", x=x, y=yy, width=12.0, height=size, **style))
        out.append(_text(x + 18, yy + size - 1, label, size=size))
    out.append("</g>")
    return out


# ---------------------------------------------------------------------------
# profile plot
# ---------------------------------------------------------------------------

def _cell_glyph(cell: ReinforcementCell, cx: float, top: float, opts: PlotOptions) -> list[str]:
    sign = 1.0 if cell.direction is Direction.UP else -1.0
    L = opts.axis_length
    bar_y = top + opts.row_height - opts.bar_height - 4
    common = dict(data_direction=cell.direction.value, data_value=cell.value)
    out = []
    if not cell.defined:
        x = cx if sign > 0 else cx - L
        out.append(_el(
            "rect", class_="placeholder", x=x, y=bar_y, width=L, height=opts.bar_height,
            fill="none", stroke="#999999", stroke_dasharray="4 3",
            data_events=cell.event_count, **common,
        ))
        return out

    p = cell.probability
    length = p * L
    tip = cx + sign * length
    classes = "bar " + (SIGNIFICANT_CLASS if cell.significant else "plain")
    color = opts.up_color if sign > 0 else opts.down_color
    out.append(_el(
        "rect", class_=classes, x=min(cx, tip), y=bar_y, width=length, height=opts.bar_height,
        fill=color, stroke=opts.highlight if cell.significant else "none",
        stroke_width=1.5 if cell.significant else None,
        data_probability=repr(float(p)), data_tip=tip, data_events=cell.event_count, **common,
    ))

    box = cell.null_box
    if box is None:
        return out
    gy = bar_y - 7  # glyph centre line, above the bar
    x = {name: cx + sign * getattr(box, name) * L for name in ("q025", "q25", "median", "q75", "q975")}
    out.append(f'<g class="nullbox" {_attrs(**common)}>')
    out.append(_el("line", class_="whisker", x1=x["q025"], y1=gy, x2=x["q975"], y2=gy,
                   stroke="#555555", data_low=x["q025"], data_high=x["q975"]))
    for end in ("q025", "q975"):
        out.append(_el("line", class_="whisker-cap", x1=x[end], y1=gy - 3, x2=x[end], y2=gy + 3,
                       stroke="#555555"))
    lo, hi = sorted((x["q25"], x["q75"]))
    out.append(_el("rect", class_="box", x=lo, y=gy - 4, width=hi - lo, height=8.0,
                   fill="#ffffff", stroke="#555555"))
    out.append(_el("line", class_="median", x1=x["median"], y1=gy - 4, x2=x["median"], y2=gy + 4,
                   stroke="#000000"))
    out.append("</g>")
    return out


def render_profile(profile: ReinforcementProfile, options: PlotOptions | None = None) -> str:
    """SVG of a reinforcement profile.

    Downward bars extend left of the centre line, upward bars right, both on
    a [0, 1] axis of ``axis_length`` pixels. Significant bars carry the
    ``significant`` class; undefined cells are dashed hollow placeholders.
    """
    opts = options or PlotOptions()
    values = list(range(profile.scale, 1, -1))
    cx = opts.margin + opts.label_width + opts.axis_length
    plot_top = opts.margin + 24
    width = cx + opts.axis_length + opts.margin + 150
    height = plot_top + len(values) * opts.row_height + 60
    body = [_text(opts.margin, opts.margin, f"{profile.attribute}", size=opts.font_size + 3,
                  font_weight="bold")]
    body.append(_text(cx - opts.axis_length, plot_top - 6, "downward", size=opts.font_size))
    body.append(_text(cx + opts.axis_length, plot_top - 6, "upward", anchor="end", size=opts.font_size))

    for i, v in enumerate(values):
        top = plot_top + i * opts.row_height
        body.append(f'<g class="row" data-value="{v}">')
        body.append(_text(opts.margin, top + opts.row_height - 8, f"value {v}", size=opts.font_size))
        for direction in (Direction.DOWN, Direction.UP):
            body.extend(_cell_glyph(profile.cell(direction, v), cx, top, opts))
        body.append("</g>")

    bottom = plot_top + len(values) * opts.row_height
    body.append(_el("line", class_="centre", x1=cx, y1=plot_top, x2=cx, y2=bottom, stroke="#000000"))
    body.append(_el("line", class_="axis", x1=cx - opts.axis_length, y1=bottom,
                    x2=cx + opts.axis_length, y2=bottom, stroke="#000000"))
    for t in (0.0, 0.5, 1.0):
        for sign in ((1.0,) if t == 0 else (-1.0, 1.0)):
            tx = cx + sign * t * opts.axis_length
            body.append(_el("line", x1=tx, y1=bottom, x2=tx, y2=bottom + 4, stroke="#000000"))
            body.append(_text(tx, bottom + 16, f"{t:g}", anchor="middle", size=opts.font_size))

    legend = [
        ("downward reinforcement", {"fill": opts.down_color}),
        ("upward reinforcement", {"fill": opts.up_color}),
        ("significant (outlined)", {"fill": "#ffffff", "stroke": opts.highlight, "stroke-width": "1.5"}),
        ("null 95% box", {"fill": "#ffffff", "stroke": "#555555"}),
        ("undefined (low support)", {"fill": "none", "stroke": "#999999", "stroke-dasharray": "4 3"}),
    ]
    legend = [(label, {k.replace("-", "_"): v for k, v in style.items()}) for label, style in legend]
    body.extend(_legend(cx + opts.axis_length + 20, plot_top, legend, opts.font_size))
    return _document(width, height, f"Reinforcement profile of {profile.attribute}", body)


# ---------------------------------------------------------------------------
# ranking plot
# ---------------------------------------------------------------------------

def render_ranking(scores: Sequence[AttributeScore], options: PlotOptions | None = None) -> str:
    """Horizontal bar chart of ReliefF scores, best rank on top, with a zero axis."""
    if not scores:
        raise ValueError("no scores to render")
    opts = options or PlotOptions()
    ordered = sorted(scores, key=lambda s: s.rank)
    span = max(max(abs(s.score) for s in ordered), 1e-12)
    half = opts.axis_length
    label_w = max(opts.label_width, 7.0 * max(len(s.attribute) for s in ordered))
    zero = opts.margin + label_w + half
    top = opts.margin + 20
    row = opts.bar_height + 10
    body = [_text(opts.margin, opts.margin, "ReliefF relevance", size=opts.font_size + 3, font_weight="bold")]
    for i, s in enumerate(ordered):
        y = top + i * row
        length = abs(s.score) / span * half
        x = zero if s.score >= 0 else zero - length
        body.append(_text(opts.margin, y + opts.bar_height - 2, s.attribute, size=opts.font_size))
        body.append(_el(
            "rect", class_="score-bar", x=x, y=y, width=length, height=opts.bar_height,
            fill=opts.up_color if s.score >= 0 else opts.down_color,
            data_attribute=s.attribute, data_rank=s.rank, data_score=repr(float(s.score)),
        ))
        tx = zero + (length + 4 if s.score >= 0 else -length - 4)
        body.append(_text(tx, y + opts.bar_height - 2, f"{s.score:+.4f}",
                          anchor="start" if s.score >= 0 else "end", size=opts.font_size))
    bottom = top + len(ordered) * row
    body.append(_el("line", class_="zero-axis", x1=zero, y1=top - 4, x2=zero, y2=bottom, stroke="#000000"))
    body.append(_text(zero, bottom + 14, "0", anchor="middle", size=opts.font_size))
    legend = [("positive score", {"fill": opts.up_color}), ("negative score", {"fill": opts.down_color})]
    body.extend(_legend(opts.margin, bottom + 24, legend, opts.font_size))
    width = zero + half + opts.margin + 60
    height = bottom + 24 + 2 * (opts.font_size + 6) + opts.margin
    return _document(width, height, "ReliefF relevance ranking", body)


# ---------------------------------------------------------------------------
# text report
# ---------------------------------------------------------------------------

def _row(fields: Sequence[str]) -> str:
    return "".join(f.ljust(w) for f, (_, w) in zip(fields, COLUMNS)).rstrip()


def _num(x: float | None) -> str:
    return "-" if x is None else f"{x:.4f}"


def render_text_report(
    profiles: Sequence[ReinforcementProfile],
    classifications: Sequence[KanoClassification],
    scores: Sequence[AttributeScore] | None = None,
) -> str:
    """Fixed-width report: one section per attribute, then a two-column summary.

    Cell table columns (characters): value 7, dir 6, prob 8, success 8,
    events 7, null 95% interval 19, sig 4. Summary phrases come from the
    closed vocabulary of :func:`category_phrase`.

    Raises
    ------
    ValueError
        When profiles, classifications and scores do not cover the same
        attributes; the message lists the difference.
    """
    names = [p.attribute for p in profiles]
    sets = {"profiles": names, "classifications": [c.attribute for c in classifications]}
    if scores is not None:
        sets["scores"] = [s.attribute for s in scores]
    reference = set(names)
    problems = []
    for label, got in sets.items():
        missing, extra = reference - set(got), set(got) - reference
        if missing:
            problems.append(f"{label} missing {sorted(missing)}")
        if extra:
            problems.append(f"{label} has extra {sorted(extra)}")
    if problems:
        raise ValueError("mismatched attribute sets: " + "; ".join(problems))

    by_class = {c.attribute: c for c in classifications}
    by_score = {s.attribute: s for s in scores} if scores is not None else {}
    lines = []
    for p in profiles:
        c = by_class[p.attribute]
        lines.append(f"== {p.attribute} ==")
        if p.attribute in by_score:
            s = by_score[p.attribute]
            lines.append(f"ReliefF score: {s.score:+.4f}  rank: {s.rank}")
        lines.append(f"base rates: up {p.base_rates['up']:.4f}  down {p.base_rates['down']:.4f}"
                     + ("" if p.omnibus_p is None else f"  omnibus p: {p.omnibus_p:.4f}"))
        lines.append(_row([h for h, _ in COLUMNS]))
        for cell in sorted(p.cells, key=lambda x: (-x.value, x.direction.value)):
            box = cell.null_box
            interval = "-" if box is None else f"[{box.q025:.3f}, {box.q975:.3f}]"
            mark = "*" if cell.significant else ("!" if cell.anti_significant else "")
            lines.append(_row([
                str(cell.value), cell.direction.value, _num(cell.probability),
                str(cell.success_count), str(cell.event_count), interval, mark,
            ]))
        category = c.category.value
        if c.category is KanoCategory.MIXED:
            category += "(" + ", ".join(x.value for x in c.components) + ")"
        lines.append(f"category: {category}" + (f" ({c.notes})" if c.notes else ""))
        if c.evidence:
            lines.append("evidence: " + ", ".join(
                f"{e.direction.value}@{e.value}{'' if e.kind == 'reinforcing' else ' anti'}" for e in c.evidence
            ))
        else:
            lines.append("evidence: none")
        lines.append("")

    width = max(len("Attribute"), *(len(n) for n in names)) + 2
    lines.append("Summary")
    lines.append("Attribute".ljust(width) + "Category")
    lines.append("-" * width + "-" * 40)
    for p in profiles:
        lines.append(p.attribute.ljust(width) + category_phrase(by_class[p.attribute]))
    lines.append("* significant reinforcement, ! significant anti-reinforcement")
    return "\n".join(lines) + "\n"

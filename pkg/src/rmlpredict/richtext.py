"""Parsing of the rich-text HTML fragments stored in RichText cells.

Only ``b``, ``i``, ``u``, ``strike`` and ``<font color="#rrggbb">`` are allowed.
A fragment decomposes into segments: maximal runs of text sharing one
formatting combination.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser

EMPHASIS_TAGS = ("b", "i", "u", "strike")
BLACK = "#000000"
UNFORMATTED = "unformatted"

_HEX = re.compile(r"#[0-9a-fA-F]{6}")


class MalformedHtmlError(ValueError):
    pass


@dataclass(frozen=True)
class Style:
    emphasis: frozenset = frozenset()
    color: str | None = None  # lowercase #rrggbb, never black

    @property
    def key(self) -> str:
        """Canonical combination key, e.g. ``b``, ``i+color:#ff0000``, ``unformatted``."""
        parts = [t for t in EMPHASIS_TAGS if t in self.emphasis]
        if self.color:
            parts.append(f"color:{self.color}")
        return "+".join(parts) if parts else UNFORMATTED

    @property
    def formatted(self) -> bool:
        return bool(self.emphasis) or self.color is not None


PLAIN = Style()


def normalize_color(color: str | None) -> str | None:
    """Lowercase hex; black and missing colors count as no color."""
    if color is None:
        return None
    if not _HEX.fullmatch(color):
        raise MalformedHtmlError(f"invalid color {color!r}")
    color = color.lower()
    return None if color == BLACK else color


def style_from_key(key: str) -> Style:
    if key == UNFORMATTED:
        return PLAIN
    emphasis, color = set(), None
    for part in key.split("+"):
        if part in EMPHASIS_TAGS:
            emphasis.add(part)
        elif part.startswith("color:"):
            color = normalize_color(part[len("color:"):])
        else:
            raise ValueError(f"unknown format key component {part!r}")
    return Style(frozenset(emphasis), color)


@dataclass(frozen=True)
class Node:
    """Element tree node; ``children`` mixes ``str`` text and nested nodes."""

    tag: str | None
    color: str | None
    children: tuple

    def text(self) -> str:
        return "".join(ch if isinstance(ch, str) else ch.text() for ch in self.children)


class _FragmentParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.stack: list[tuple[str | None, str | None, list]] = [(None, None, [])]

    def handle_starttag(self, tag, attrs):
        color = None
        if tag in EMPHASIS_TAGS:
            if attrs:
                raise MalformedHtmlError(f"<{tag}> takes no attributes")
        elif tag == "font":
            for name, value in attrs:
                if name != "color" or value is None:
                    raise MalformedHtmlError(f"unsupported font attribute {name!r}")
                if not _HEX.fullmatch(value):
                    raise MalformedHtmlError(f"invalid color {value!r}")
                color = value.lower()
        else:
            raise MalformedHtmlError(f"unsupported tag <{tag}>")
        self.stack.append((tag, color, []))

    def handle_startendtag(self, tag, attrs):
        raise MalformedHtmlError(f"self-closing <{tag}/> not allowed")

    def handle_endtag(self, tag):
        if len(self.stack) == 1 or self.stack[-1][0] != tag:
            raise MalformedHtmlError(f"unbalanced </{tag}>")
        name, color, children = self.stack.pop()
        self.stack[-1][2].append(Node(name, color, tuple(children)))

    def handle_data(self, data):
        if data:
            self.stack[-1][2].append(data)

    def handle_comment(self, data):
        raise MalformedHtmlError("comments not allowed")

    def handle_decl(self, decl):
        raise MalformedHtmlError("declarations not allowed")

    def handle_pi(self, data):
        raise MalformedHtmlError("processing instructions not allowed")

    def unknown_decl(self, data):
        raise MalformedHtmlError("declarations not allowed")


def parse_fragment(html: str) -> Node:
    parser = _FragmentParser()
    parser.feed(html)
    parser.close()
    if len(parser.stack) != 1:
        raise MalformedHtmlError(f"unclosed <{parser.stack[-1][0]}>")
    return Node(None, None, tuple(parser.stack[0][2]))


def _walk(node: Node, style: Style, out: list):
    for child in node.children:
        if isinstance(child, str):
            out.append((child, style))
            continue
        if child.tag == "font":
            color = normalize_color(child.color) if child.color else None
            # an explicit black font resets an inherited color
            sub = Style(style.emphasis, color if child.color else style.color)
        else:
            sub = Style(style.emphasis | {child.tag}, style.color)
        _walk(child, sub, out)


def segments(html: str) -> list[tuple[str, Style]]:
    """Maximal runs of text with identical formatting, in document order."""
    raw: list[tuple[str, Style]] = []
    _walk(parse_fragment(html), PLAIN, raw)
    merged: list[tuple[str, Style]] = []
    for text, style in raw:
        if merged and merged[-1][1] == style:
            merged[-1] = (merged[-1][0] + text, style)
        else:
            merged.append((text, style))
    return merged


def elements(html: str, tag: str | None = None, color: str | None = None) -> list[str]:
    """Text content of every element with ``tag`` (or font ``color``), outermost first."""
    found: list[str] = []

    def visit(node: Node):
        for child in node.children:
            if isinstance(child, str):
                continue
            if tag is not None and child.tag == tag:
                found.append(child.text())
                continue
            if color is not None and child.tag == "font" and child.color == color.lower():
                found.append(child.text())
                continue
            visit(child)

    visit(parse_fragment(html))
    return found


def strip_tags(html: str) -> str:
    return parse_fragment(html).text()


def escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")

"""Template NLG: render belief frames as utterances.

Templates live in a plain text file, sectioned by ``[speaker ACT:ACTIVITY
form]`` headers, one template per line. Placeholders: ``{slots}`` (constraint
phrase), ``{req}`` (requested slot names), ``{objs}``/``{obj0}``/``{obj1}``
(object references), ``{answers}`` (attribute answers), ``{cands}``
(disambiguation candidates), ``{compare}`` (comparison phrase). Object
references are rendered as visually grounded descriptions (attribute plus a
spatial qualifier from bbox geometry) or as anaphora for dialog coreference.
"""

from __future__ import annotations

from .errors import ConfigError, GenerationError

SLOT_LABELS = {
    "type": "type",
    "color": "color",
    "pattern": "pattern",
    "material": "material",
    "price": "price",
    "size": "available sizes",
    "brand": "brand",
    "customer_rating": "customer rating",
}

# Words in an object description that carry no entity content.
PHRASE_STOPWORDS = {"the", "a", "an", "one", "that", "in", "on", "at", "of", "to"}

ANAPHORA = ("it", "that one", "the one you mentioned", "the one from before")


def parse_templates(text: str) -> dict[tuple[str, str, str], list[str]]:
    sections: dict[tuple[str, str, str], list[str]] = {}
    key = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            parts = line[1:-1].split()
            if len(parts) != 3 or ":" not in parts[1]:
                raise ConfigError(f"bad template section header: {line}")
            key = (parts[0], parts[1], parts[2])
            sections.setdefault(key, [])
        elif key is None:
            raise ConfigError("template line before any section header")
        else:
            sections[key].append(line)
    return sections


def join_and(parts: list[str]) -> str:
    if not parts:
        return ""
    if len(parts) == 1:
        return parts[0]
    return ", ".join(parts[:-1]) + " and " + parts[-1]


def slot_phrase(slot_values: dict, domain: str) -> str:
    """Noun phrase carrying every constraint value verbatim."""
    adjectives = [slot_values[s] for s in ("color", "pattern", "material") if s in slot_values]
    noun = slot_values.get("type", "item")
    head = "a " + " ".join(adjectives + [noun]) if adjectives else f"a {noun}"
    tails = []
    if "brand" in slot_values:
        tails.append(f"from {slot_values['brand']}")
    if "price" in slot_values:
        tails.append(f"priced at ${slot_values['price']}")
    if "size" in slot_values:
        tails.append(f"in size {slot_values['size']}")
    if "customer_rating" in slot_values:
        tails.append(f"rated {slot_values['customer_rating']} stars")
    return " ".join([head] + tails) if tails else head


def answer_phrase(slot_values: dict) -> str:
    """Assistant attribute answers; every value appears verbatim."""
    parts = []
    for slot in sorted(slot_values):
        value = slot_values[slot]
        if slot == "price":
            parts.append(f"priced at ${value}")
        elif slot == "size":
            parts.append(f"available in {value}")
        elif slot == "brand":
            parts.append(f"made by {value}")
        elif slot == "customer_rating":
            parts.append(f"rated {value} stars")
        elif slot == "material":
            parts.append(f"made of {value}")
        elif slot == "pattern":
            parts.append(f"in a {value} pattern")
        elif slot == "color":
            parts.append(f"in {value}")
        else:
            parts.append(f"a {value}")
    return join_and(parts)


def request_phrase(request_slots) -> str:
    return join_and([SLOT_LABELS.get(s, s) for s in sorted(request_slots)])


def phrase_tokens(phrase: str) -> list[str]:
    """Content tokens of a rendered object description."""
    toks = [t.strip(".,?!").casefold() for t in phrase.split()]
    return [t for t in toks if t and t not in PHRASE_STOPWORDS]


class SnapshotContext:
    """A snapshot joined with its catalog items, plus index lookups."""

    def __init__(self, snapshot, catalog):
        self.snapshot = snapshot
        self.catalog = catalog
        self.items = [catalog.by_id[o.item_id] for o in snapshot.objects]
        self.slot_to_index = {o.slot_id: o.local_index for o in snapshot.objects}

    @property
    def snapshot_id(self) -> str:
        return self.snapshot.snapshot_id

    def object_count(self) -> int:
        return len(self.snapshot.objects)

    def category_of(self, local_index: int) -> str:
        return self.items[local_index].category

    def same_category(self, local_index: int) -> list[int]:
        cat = self.category_of(local_index)
        return [i for i in range(len(self.items)) if self.items[i].category == cat]


def object_phrase(ctx: SnapshotContext, local_index: int, rng, vague: bool = False) -> str:
    """Visually grounded description of one annotated object.

    Spatial qualifiers derive from projected geometry only: horizontal order
    uses bbox centers, near/far uses the depth-ordered local index.
    """
    item = ctx.items[local_index]
    if vague:
        return rng.choice([f"the {item.category}", f"that {item.category}",
                           f"one of those {item.category}s"])
    peers = ctx.same_category(local_index)
    phrase = f"{item.color} {item.category}"
    if len(peers) > 1:
        same_color = [i for i in peers if ctx.items[i].color == item.color]
        if len(same_color) > 1:
            centers = {i: ctx.snapshot.objects[i].bbox[0] + ctx.snapshot.objects[i].bbox[2] / 2
                       for i in same_color}
            xs = sorted(same_color, key=lambda i: (centers[i], i))
            if xs[0] == local_index:
                phrase = "leftmost " + phrase
            elif xs[-1] == local_index:
                phrase = "rightmost " + phrase
            elif min(same_color) == local_index:
                phrase = phrase + " in front"
            elif max(same_color) == local_index:
                phrase = phrase + " at the back"
            else:
                phrase = phrase + " in the middle"
    return f"the {phrase}"


def infer_form(frame, speaker: str) -> str:
    """Template section picker from the frame's shape."""
    act, activity = frame.act, frame.activity
    if activity == "DISAMBIGUATE":
        return "clarify" if speaker == "assistant" else "resolve"
    if activity == "GET":
        if speaker == "user":
            return "info" if frame.objects else "browse"
        if not frame.objects:
            return "nomatch"
        return "answer" if frame.slot_values else "recommend"
    if activity == "REFINE":
        if speaker == "user":
            return "refine"
        return "recommend" if frame.objects else "nomatch"
    if activity == "ADD_TO_CART":
        return "add" if speaker == "user" else "confirm"
    if activity == "COMPARE":
        return "ask" if speaker == "user" else "answer"
    raise GenerationError(f"no template form for {speaker} {act}:{activity}")


def realize(frame, ctx: SnapshotContext, templates: dict, rng,
            object_phrases: dict | None = None, domain: str | None = None,
            compare_phrase: str = "", prefix: str = "") -> str:
    """Fill a template for the frame; deterministic given the rng state."""
    speaker = "assistant" if frame.disambiguation_label is None else "user"
    form = infer_form(frame, speaker)
    key = (speaker, frame.intent, form)
    options = templates.get(key)
    if not options:
        raise GenerationError(f"missing template for {key}")
    template = options[rng.randrange(len(options))]

    phrases = object_phrases or {}
    rendered = {i: phrases.get(obj) or rng.choice(ANAPHORA)
                for i, obj in enumerate(frame.objects)}
    text = template
    dom = domain or "fashion"
    if "{slots}" in text:
        text = text.replace("{slots}", slot_phrase(frame.slot_values, dom))
    if "{answers}" in text:
        text = text.replace("{answers}", answer_phrase(frame.slot_values))
    if "{req}" in text:
        text = text.replace("{req}", request_phrase(frame.request_slots))
    if "{objs}" in text:
        text = text.replace("{objs}", join_and([rendered[i] for i in range(len(frame.objects))]))
    if "{cands}" in text:
        text = text.replace("{cands}", " or ".join(rendered[i] for i in range(len(frame.objects))))
    if "{compare}" in text:
        text = text.replace("{compare}", compare_phrase)
    for i in range(len(frame.objects)):
        text = text.replace(f"{{obj{i}}}", rendered[i])
    if text and text[0].islower():
        # No template opens with a slot-value placeholder, so this never
        # touches a value that retention checks must find verbatim.
        text = text[0].upper() + text[1:]
    return (prefix + text) if prefix else text

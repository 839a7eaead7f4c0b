"""Collects one line per acceptance criterion for the terminal summary."""

LINES: dict = {}


def record(key: str, ok: bool, detail: str) -> bool:
    LINES[key] = f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}"
    return ok


def _order(key: str):
    return (int(key.rstrip("abcdefgh")), key)


def summary_lines() -> list:
    """Recorded lines in criterion order; a criterion split into parts also gets an overall line."""
    out = []
    parents = sorted({k.rstrip("abcdefgh") for k in LINES if k[-1].isalpha()}, key=int)
    for key in sorted(LINES, key=_order):
        if key in parents:
            continue
        if key[-1].isalpha() and key.endswith("a") and key[:-1] in parents:
            parts = [k for k in LINES if k.rstrip("abcdefgh") == key[:-1] and k != key[:-1]]
            failed = sorted(k for k in parts if LINES[k].startswith("FAIL"))
            verdict = "FAIL" if failed else "PASS"
            note = f"failing parts {', '.join(failed)}" if failed else "all parts pass"
            out.append(f"{verdict}  criterion {key[:-1]}: {note} ({len(parts)} parts)")
        out.append("    " + LINES[key] if key[-1].isalpha() else LINES[key])
    return out

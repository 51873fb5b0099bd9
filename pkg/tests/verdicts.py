"""Acceptance verdict lines, collected during the run and printed at the end."""

LINES = []


def record(label, ok, detail):
    line = f"CRITERION {label} {'PASS' if ok else 'FAIL'}: {detail}"
    LINES.append(line)
    print(line)
    return ok

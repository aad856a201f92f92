"""Interactive read-eval-print loop over a prover session.

Sentences end with '.'; multi-line input is accumulated until then.
With a proof open, input is interpreted as tactics (plus Qed/undo);
otherwise as top-level declarations.  The batch checker and the wire
protocol drive the same session methods, so a piped script reproduces
an interactive transcript exactly.
"""

from __future__ import annotations

import sys

from .errors import ProverError
from .session import Session
from .surface import parse_dev_text, parse_tactic_text


def _sentences(stream):
    buf = ""
    for line in stream:
        stripped = line.split("%", 1)[0]
        buf += stripped if stripped.endswith("\n") else stripped + "\n"
        while "." in buf:
            # a sentence ends at a '.' followed by whitespace/EOL
            idx = buf.index(".")
            yield buf[: idx + 1]
            buf = buf[idx + 1 :]
    if buf.strip():
        yield buf


def repl(session: Session, infile=None, out=None, prompt: str = "polyprove< "):
    infile = infile or sys.stdin
    out = out or sys.stdout
    interactive = hasattr(infile, "isatty") and infile.isatty()

    def emit(kind, info):
        if kind == "completed":
            print(f"Proof completed: {info}.", file=out)
        elif kind in ("kind", "type", "define", "spec"):
            print(f"Loaded {kind} {info}.", file=out)

    if interactive:
        print("polyprove interactive session; end sentences with '.'", file=out)
    for sentence in _sentences(infile):
        text = sentence.strip()
        if not text:
            continue
        if interactive:
            print(f"{prompt}{text}", file=out)
        try:
            _run_sentence(session, text, emit)
        except ProverError as e:
            print(f"Error: {e}", file=out)
            continue
        if session.proof is not None:
            print(session.render_state(), file=out)
    return session


def _run_sentence(session: Session, text: str, emit):
    word = text.split(None, 1)[0].rstrip(".")
    if word == "Qed":
        if session.proof is None:
            raise ProverError("no proof in progress")
        session.qed()
        return
    if session.proof is not None:
        session.run_tactic(parse_tactic_text(text), emit)  # emits completion
        if session.proof is not None and session.proof.state.complete:
            session.qed()
        return
    items = parse_dev_text(text)
    for item in items:
        session.load_item(item, emit, allow_open=True)


def main(path=None, base_dir="."):
    session = Session(base_dir=base_dir)
    if path:
        with open(path) as fh:
            session.load_text(fh.read(), interactive=True)
        print(session.render_state())
    repl(session)

"""Translator adapters.

External translators speak a line protocol: the harness writes one UTF-8
source line per input on the child's stdin and expects exactly one output
line per input, in order. A persistent child must flush its stdout after
each batch.
"""

from __future__ import annotations

import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .enrich import split_input

KINDS = ("external-command", "hypothesis-file", "builtin-echo", "builtin-dictionary")
DEFAULT_TIMEOUT = 600.0


class TranslatorError(RuntimeError):
    pass


class ProtocolError(TranslatorError):
    """The translator broke the one-line-in, one-line-out contract."""


@dataclass(frozen=True)
class TranslatorSpec:
    kind: str
    command: str | tuple[str, ...] | None = None
    path: str | None = None
    batch_size: int = 64
    timeout: float = DEFAULT_TIMEOUT
    persistent: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown translator kind {self.kind!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.kind == "external-command" and not self.command:
            raise ValueError("external-command translator needs a command")
        if self.kind in ("hypothesis-file", "builtin-dictionary") and not self.path:
            raise ValueError(f"{self.kind} translator needs a path")

    @property
    def argv(self) -> list[str]:
        if isinstance(self.command, str):
            return shlex.split(self.command)
        return list(self.command or ())


def _check_lines(sources: Sequence[str]) -> None:
    for i, s in enumerate(sources):
        if "\n" in s or "\r" in s:
            raise ProtocolError(f"source {i} contains a line break")


def _batches(items: Sequence[str], size: int):
    for i in range(0, len(items), size):
        yield items[i:i + size]


class ChildProcess:
    """A long-running translator process fed batch by batch."""

    def __init__(self, argv: Sequence[str], timeout: float = DEFAULT_TIMEOUT):
        self.argv = list(argv)
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.PIPE, text=True, encoding="utf-8", bufsize=1)
        except OSError as e:
            raise TranslatorError(f"cannot start {self.argv[0]!r}: {e}") from e
        self._lines: queue.Queue = queue.Queue()
        self._stderr: list[str] = []
        self._readers = [
            threading.Thread(target=self._pump_stdout, daemon=True),
            threading.Thread(target=self._pump_stderr, daemon=True),
        ]
        for t in self._readers:
            t.start()

    def _pump_stdout(self):
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _pump_stderr(self):
        for line in self.proc.stderr:
            self._stderr.append(line)
            if len(self._stderr) > 200:
                del self._stderr[:100]

    def diagnostics(self) -> str:
        return "".join(self._stderr[-20:]).strip()

    def _fail(self, message: str, cls=TranslatorError):
        self.kill()
        diag = self.diagnostics()
        raise cls(f"{message}" + (f"\nstderr:\n{diag}" if diag else ""))

    def translate_batch(self, batch: Sequence[str]) -> list[str]:
        try:
            self.proc.stdin.write("".join(s + "\n" for s in batch))
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self.proc.wait()
            self._fail(f"translator exited with status {self.proc.returncode} while reading input")
        out = []
        for _ in batch:
            try:
                line = self._lines.get(timeout=self.timeout)
            except queue.Empty:
                self._fail(f"translator timed out after {self.timeout} s "
                           f"({len(out)} of {len(batch)} lines received)")
            if line is None:
                self.proc.wait()
                if self.proc.returncode:
                    self._fail(f"translator exited with status {self.proc.returncode}")
                self._fail(f"translator closed its output after {len(out)} of {len(batch)} lines",
                           ProtocolError)
            out.append(line.rstrip("\n").rstrip("\r"))
        return out

    def close(self) -> None:
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        try:
            self.proc.wait(timeout=self.timeout)
        except subprocess.TimeoutExpired:
            self._fail("translator did not exit after its input was closed")
        for t in self._readers:
            t.join(timeout=5)
        extra = []
        while True:
            try:
                line = self._lines.get_nowait()
            except queue.Empty:
                break
            if line is not None:
                extra.append(line)
        if self.proc.returncode:
            self._fail(f"translator exited with status {self.proc.returncode}")
        if extra:
            raise ProtocolError(f"translator produced {len(extra)} unexpected extra line(s)")

    def kill(self) -> None:
        if self.proc.poll() is None:
            self.proc.kill()
            self.proc.wait()


def _run_once(argv: Sequence[str], batch: Sequence[str], timeout: float) -> list[str]:
    try:
        res = subprocess.run(list(argv), input="".join(s + "\n" for s in batch),
                             capture_output=True, text=True, encoding="utf-8", timeout=timeout)
    except subprocess.TimeoutExpired:
        raise TranslatorError(f"translator timed out after {timeout} s") from None
    except OSError as e:
        raise TranslatorError(f"cannot start {argv[0]!r}: {e}") from e
    if res.returncode:
        raise TranslatorError(f"translator exited with status {res.returncode}\n"
                              f"stderr:\n{res.stderr.strip()}")
    lines = res.stdout.splitlines()
    if len(lines) != len(batch):
        raise ProtocolError(f"translator returned {len(lines)} lines for {len(batch)} inputs")
    return lines


def load_word_table(path: str | Path) -> dict[str, str]:
    """Read ``source<TAB>target`` lines; ``#`` starts a comment line."""
    table = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'source<TAB>target'")
            table[parts[0]] = parts[1]
    return table


def dictionary_translate(line: str, table: Mapping[str, str]) -> str:
    """Word-by-word lookup, identity for unknown words.

    A tag suffix after the ``##`` separator is context for the model, not
    text to translate, so it is dropped.
    """
    sentence, _ = split_input(line)
    out = []
    for word in sentence.split():
        target = table.get(word, table.get(word.lower(), word))
        if target:
            out.append(target)
    return " ".join(out)


def translate(spec: TranslatorSpec, sources: Sequence[str], **fmt) -> list[str]:
    """Translate ``sources`` in order. ``fmt`` fills ``{...}`` fields in a hypothesis-file path."""
    if not sources:
        raise ValueError("nothing to translate")
    _check_lines(sources)

    if spec.kind == "builtin-echo":
        return list(sources)

    if spec.kind == "builtin-dictionary":
        table = load_word_table(spec.path)
        return [dictionary_translate(s, table) for s in sources]

    if spec.kind == "hypothesis-file":
        path = spec.path.format(**fmt) if fmt else spec.path
        try:
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
        except OSError as e:
            raise TranslatorError(f"cannot read hypotheses from {path}: {e}") from e
        if len(lines) != len(sources):
            raise ProtocolError(f"{path} has {len(lines)} lines for {len(sources)} sources")
        return lines

    if not spec.persistent:
        out = []
        for batch in _batches(sources, spec.batch_size):
            out.extend(_run_once(spec.argv, batch, spec.timeout))
        return out

    child = ChildProcess(spec.argv, spec.timeout)
    out = []
    try:
        for batch in _batches(sources, spec.batch_size):
            out.extend(child.translate_batch(batch))
    except BaseException:
        child.kill()
        raise
    child.close()
    return out

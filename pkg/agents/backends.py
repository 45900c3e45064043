"""
Text-generation backends: a remote chat endpoint and a scripted transcript player
"""

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import requests

from config import BackendSettings
from models import AgentRequest, AgentResponse, TokenUsage
from utils.validators import CredentialError, TranscriptError, TransportError

logger = logging.getLogger(__name__)

TRANSIENT_STATUS_CODES = {408, 429, 500, 502, 503, 504}
RESPONSE_HEADER = ">>>"
ENTRY_HEADER = "=== entry:"


class TextBackend:
    """Turns a rendered prompt into a completion"""

    backend_id = "backend"

    def complete(self, request: AgentRequest, prompt: str) -> AgentResponse:
        raise NotImplementedError


class RemoteBackend(TextBackend):
    """OpenAI-style chat completion endpoint reached with requests"""

    def __init__(self, settings: BackendSettings, sleep=time.sleep):
        if not settings.endpoint:
            raise CredentialError("SAFELTL_LLM_ENDPOINT is not set")
        if not settings.api_token:
            raise CredentialError("SAFELTL_LLM_TOKEN is not set")
        self.settings = settings
        self.backend_id = f"remote:{settings.model}"
        self._sleep = sleep

    def _payload(self, request: AgentRequest, prompt: str) -> dict:
        payload = {
            'model': self.settings.model,
            'messages': [{'role': 'user', 'content': prompt}],
            'temperature': request.temperature,
            'max_tokens': request.max_output_tokens,
        }
        if self.settings.seed is not None:
            payload['seed'] = self.settings.seed
        return payload

    def complete(self, request: AgentRequest, prompt: str) -> AgentResponse:
        payload = self._payload(request, prompt)
        attempts = self.settings.transport_retries + 1
        last_error = "no attempt made"

        for attempt in range(attempts):
            if attempt:
                delay = self.settings.backoff_seconds * (2 ** (attempt - 1))
                logger.warning("Retrying %s in %.1fs (attempt %d of %d): %s",
                               request.template_id, delay, attempt + 1, attempts, last_error)
                self._sleep(delay)
            try:
                response = requests.post(
                    self.settings.endpoint,
                    headers={
                        'Authorization': f'Bearer {self.settings.api_token}',
                        'Content-Type': 'application/json'
                    },
                    json=payload,
                    timeout=self.settings.timeout
                )
            except requests.exceptions.Timeout:
                last_error = "request timed out"
                continue
            except requests.exceptions.ConnectionError as e:
                last_error = f"connection error: {e}"
                continue
            except requests.exceptions.RequestException as e:
                raise TransportError(f"Request to {self.settings.endpoint} failed: {e}")

            if response.status_code in TRANSIENT_STATUS_CODES:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise TransportError(f"Endpoint returned {response.status_code}: {response.text[:200]}")

            try:
                data = response.json()
            except ValueError as e:
                raise TransportError(f"Endpoint returned invalid JSON: {e}")
            text = first_text_segment(data)
            if not text:
                raise TransportError("Endpoint reply carries no text")
            usage = data.get('usage') or {}
            return AgentResponse(
                text=text,
                usage=TokenUsage(int(usage.get('prompt_tokens', usage.get('input_tokens', 0)) or 0),
                                 int(usage.get('completion_tokens', usage.get('output_tokens', 0)) or 0)),
                backend_id=self.backend_id,
            )

        raise TransportError(f"Endpoint unreachable after {attempts} attempts: {last_error}")


def first_text_segment(data: dict) -> Optional[str]:
    """First text segment of a chat reply in the common JSON shapes"""
    choices = data.get('choices')
    if choices:
        choice = choices[0]
        message = choice.get('message') or {}
        if message.get('content'):
            return message['content']
        if choice.get('text'):
            return choice['text']
    content = data.get('content')
    if isinstance(content, list):
        for part in content:
            if isinstance(part, dict) and part.get('text'):
                return part['text']
    if isinstance(data.get('output_text'), str):
        return data['output_text']
    return None


@dataclass(frozen=True)
class ScriptedTranscript:
    """Ordered (template id, reply) pairs"""
    entries: Tuple[Tuple[str, str], ...]

    @classmethod
    def from_text(cls, text: str) -> "ScriptedTranscript":
        entries: List[Tuple[str, str]] = []
        current_id: Optional[str] = None
        lines: List[str] = []
        for raw in text.splitlines():
            if raw.startswith(RESPONSE_HEADER):
                if current_id is not None:
                    entries.append((current_id, "\n".join(lines).strip()))
                current_id = raw[len(RESPONSE_HEADER):].strip()
                if not current_id:
                    raise TranscriptError("Transcript header without a template id")
                lines = []
            elif current_id is not None:
                lines.append(raw)
            elif raw.strip() and not raw.lstrip().startswith("#"):
                raise TranscriptError(f"Text before the first '{RESPONSE_HEADER}' header: {raw.strip()}")
        if current_id is not None:
            entries.append((current_id, "\n".join(lines).strip()))
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class TranscriptBook:
    """Transcript file contents: a shared transcript and/or per-entry sections"""
    default: Optional[ScriptedTranscript] = None
    entries: Dict[str, ScriptedTranscript] = field(default_factory=dict)

    @property
    def is_per_entry(self) -> bool:
        return bool(self.entries)

    def for_entry(self, entry_id: str) -> ScriptedTranscript:
        if entry_id in self.entries:
            return self.entries[entry_id]
        if self.default is not None:
            return self.default
        raise TranscriptError(f"Transcript has no section for entry '{entry_id}'")

    @classmethod
    def from_text(cls, text: str) -> "TranscriptBook":
        sections: Dict[Optional[str], List[str]] = {None: []}
        order: List[Optional[str]] = [None]
        current: Optional[str] = None
        for raw in text.splitlines():
            if raw.startswith(ENTRY_HEADER):
                current = raw[len(ENTRY_HEADER):].strip()
                if not current or current in sections:
                    raise TranscriptError(f"Bad or repeated transcript section '{current}'")
                sections[current] = []
                order.append(current)
                continue
            sections[current].append(raw)

        book = cls()
        default = ScriptedTranscript.from_text("\n".join(sections[None]))
        if default.entries:
            book.default = default
        for name in order[1:]:
            book.entries[name] = ScriptedTranscript.from_text("\n".join(sections[name]))
        return book


class ScriptedBackend(TextBackend):
    """Replays a transcript strictly in order"""

    backend_id = "scripted"

    def __init__(self, transcript: ScriptedTranscript):
        self.transcript = transcript
        self.position = 0
        self._lock = threading.Lock()

    @property
    def remaining(self) -> int:
        return len(self.transcript) - self.position

    def complete(self, request: AgentRequest, prompt: str) -> AgentResponse:
        with self._lock:
            if self.position >= len(self.transcript):
                raise TranscriptError(
                    f"Transcript exhausted after {self.position} replies; next request was '{request.template_id}'")
            expected, text = self.transcript.entries[self.position]
            if expected != request.template_id:
                raise TranscriptError(
                    f"Transcript entry {self.position + 1} is for '{expected}', "
                    f"but '{request.template_id}' was requested")
            self.position += 1

        return AgentResponse(
            text=text,
            usage=TokenUsage(len(prompt.split()), len(text.split())),
            backend_id=self.backend_id,
        )

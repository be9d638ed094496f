"""RFC-5322/MIME message parsing."""

from __future__ import annotations

import email
import email.policy
from dataclasses import dataclass, field

from ..errors import MalformedMimeError


@dataclass
class EmailParts:
    """The three things an email decomposes into."""

    plain_text: str | None = None
    html_body: bytes | None = None
    attachments: list[tuple[str, bytes]] = field(default_factory=list)


def parse_email(data: bytes) -> EmailParts:
    """Split a .eml message into plain text, HTML body and attachments.

    The first text/plain and text/html parts win; any part carrying a
    content-disposition filename is an attachment. Transfer encodings
    (base64, quoted-printable) are decoded.
    """
    try:
        message = email.message_from_bytes(data, policy=email.policy.default)
    except Exception as exc:  # pragma: no cover - stdlib rarely raises
        raise MalformedMimeError(str(exc)) from exc
    if not message.keys():
        raise MalformedMimeError("no RFC-5322 headers found")

    parts = EmailParts()
    for part in message.walk():
        if part.is_multipart():
            continue
        filename = part.get_filename()
        if filename:
            payload = part.get_payload(decode=True) or b""
            parts.attachments.append((filename, payload))
            continue
        content_type = part.get_content_type()
        if content_type == "text/plain" and parts.plain_text is None:
            parts.plain_text = part.get_content()
        elif content_type == "text/html" and parts.html_body is None:
            parts.html_body = part.get_payload(decode=True) or b""
    return parts

"""Notification delivery with exponential backoff and terminal 4xx handling."""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import requests

from .codec import MEDIA_TYPE, serialize_payload
from .model import NotificationPayload

log = logging.getLogger(__name__)


class DeliveryOutcome(str, Enum):
    DELIVERED = "Delivered"
    GAVE_UP = "GaveUp"


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay: float = 0.1
    jitter: bool = False
    timeout: float = 10.0

    def delay(self, attempt: int) -> float:
        # attempt is 1-based; backoff doubles per failed attempt
        delay = self.base_delay * 2 ** (attempt - 1)
        if self.jitter:
            delay = random.uniform(0, delay)
        return delay


@dataclass(frozen=True)
class DeliveryReceipt:
    target_inbox: str
    notification_id: str
    attempts: int
    outcome: DeliveryOutcome
    location: Optional[str] = None

    @property
    def delivered(self) -> bool:
        return self.outcome is DeliveryOutcome.DELIVERED


def deliver(
    payload: NotificationPayload,
    retry: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
    post: Callable = requests.post,
) -> DeliveryReceipt:
    """POST the payload to its target inbox; never raises for remote failure.

    Retries connection errors and 5xx responses with exponential backoff;
    4xx responses are terminal immediately.
    """
    target = payload.target.inbox
    body = serialize_payload(payload)
    attempts = 0
    while attempts < retry.max_attempts:
        attempts += 1
        try:
            response = post(
                target,
                data=body,
                headers={"Content-Type": MEDIA_TYPE},
                timeout=retry.timeout,
            )
        except requests.RequestException as exc:
            log.debug("delivery to %s failed on attempt %d: %s", target, attempts, exc)
            response = None
        if response is not None:
            if 200 <= response.status_code < 300:
                location = response.headers.get("Location") or target
                return DeliveryReceipt(
                    target_inbox=target,
                    notification_id=payload.notification_id,
                    attempts=attempts,
                    outcome=DeliveryOutcome.DELIVERED,
                    location=location,
                )
            if 400 <= response.status_code < 500:
                log.warning(
                    "delivery to %s rejected with %d; not retrying",
                    target,
                    response.status_code,
                )
                break
        if attempts < retry.max_attempts:
            sleep(retry.delay(attempts))
    return DeliveryReceipt(
        target_inbox=target,
        notification_id=payload.notification_id,
        attempts=attempts,
        outcome=DeliveryOutcome.GAVE_UP,
    )

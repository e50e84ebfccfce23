"""Client for the solver service.

Two transports behind one interface: in-process (the default — requests go
straight to the FastAPI app through its test transport, no socket, nothing
to deploy) or remote over HTTP when a base URL is given.  The CLI is built
on this, so `isingkit solve ...` works standalone and against a running
`isingkit serve` unchanged.
"""

from __future__ import annotations

from typing import Any

import httpx

__all__ = ["ServiceClient", "ServiceError"]


class ServiceError(RuntimeError):
    """Non-2xx response from the service, with the extracted detail."""

    def __init__(self, status_code: int, detail: str):
        super().__init__(f"service error {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class ServiceClient:
    def __init__(self, base_url: str | None = None, timeout: float | None = None):
        if base_url is None:
            import warnings

            with warnings.catch_warnings():
                # the in-process transport import warns about its own
                # httpx pin; nothing actionable for callers
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._http: Any = TestClient(create_app())
        else:
            self._http = httpx.Client(base_url=base_url, timeout=timeout)

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _post(self, path: str, payload: dict) -> dict:
        response = self._http.post(path, json=payload)
        return self._unwrap(response)

    def _unwrap(self, response) -> dict:
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            if not isinstance(detail, str):
                detail = repr(detail)
            raise ServiceError(response.status_code, detail)
        return response.json()

    # -- endpoint wrappers ------------------------------------------------

    def health(self) -> dict:
        return self._unwrap(self._http.get("/health"))

    def generate(self, kind: str, n: int, seed: int = 0, metadata: dict | None = None) -> dict:
        payload: dict = {"kind": kind, "n": n, "seed": seed}
        if metadata is not None:
            payload["metadata"] = metadata
        return self._post("/instances/generate", payload)

    def solve(
        self,
        instance: dict,
        variant: str = "cfc",
        shots: int = 100,
        base_seed: int = 0,
        descent: bool = True,
        workers: int | None = None,
        overrides: dict | None = None,
    ) -> dict:
        return self._post(
            "/solve",
            {
                "instance": instance,
                "variant": variant,
                "shots": shots,
                "base_seed": base_seed,
                "descent": descent,
                "workers": workers,
                "overrides": overrides or {},
            },
        )

    def exact(self, instance: dict) -> dict:
        return self._post("/exact", {"instance": instance})

    def convert(self, q: list[list[float]], constant: float = 0.0, metadata: dict | None = None) -> dict:
        payload: dict = {"Q": q, "constant": constant}
        if metadata is not None:
            payload["metadata"] = metadata
        return self._post("/convert", payload)

    def bench(
        self,
        instances: list[dict],
        variants: list[str] | None = None,
        shots: int = 100,
        base_seed: int = 0,
        descent: bool = True,
        tol: float = 1e-9,
        workers: int | None = None,
        overrides: dict | None = None,
    ) -> dict:
        payload: dict = {
            "instances": instances,
            "shots": shots,
            "base_seed": base_seed,
            "descent": descent,
            "tol": tol,
            "workers": workers,
            "overrides": overrides or {},
        }
        if variants is not None:
            payload["variants"] = variants
        return self._post("/bench", payload)

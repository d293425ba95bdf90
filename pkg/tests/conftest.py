from __future__ import annotations

import pytest

from dagswarm import StubServer


@pytest.fixture(scope="session")
def stub_server():
    server = StubServer().start()
    yield server
    server.stop()


@pytest.fixture()
def clean_stub(stub_server):
    stub_server.requests.clear()
    return stub_server

"""Headless protocol client used by the server and acceptance tests.

Folds the snapshot plus every mutation broadcast into a local POI map the
same way a real console would, so tests can compare client-side state
byte-for-byte against the server store.
"""

import asyncio
import json
from contextlib import asynccontextmanager

from websockets.asyncio.client import connect

RECV_TIMEOUT = 5.0


@asynccontextmanager
async def running_server(server, host="127.0.0.1"):
    ws_server = await server.serve(host, 0)
    port = ws_server.sockets[0].getsockname()[1]
    try:
        yield f"ws://{host}:{port}"
    finally:
        ws_server.close()
        await ws_server.wait_closed()


class SyncClient:
    def __init__(self, conn, client_id):
        self.conn = conn
        self.client_id = client_id
        self.pois = {}
        self.snapshot_seq = None
        self.seqs_seen = []

    @classmethod
    async def join(cls, url, client_id):
        conn = await connect(url)
        client = cls(conn, client_id)
        await client.send({"type": "hello", "client_id": client_id})
        snap = await client.recv()
        assert snap["type"] == "snapshot", snap
        client.snapshot_seq = snap["seq"]
        client.pois = {p["id"]: p for p in snap["pois"]}
        return client

    async def close(self):
        await self.conn.close()

    async def send(self, msg):
        await self.conn.send(json.dumps(msg))

    async def recv(self, timeout=RECV_TIMEOUT):
        raw = await asyncio.wait_for(self.conn.recv(), timeout)
        msg = json.loads(raw)
        self._fold(msg)
        return msg

    async def recv_until(self, type_, timeout=RECV_TIMEOUT):
        """Read (and fold) messages until one of the given type arrives."""
        while True:
            msg = await self.recv(timeout)
            if msg["type"] == type_:
                return msg

    async def mutate(self, msg):
        """Send a mutation and wait for its ack (folding broadcasts)."""
        await self.send(msg)
        return await self.recv_until("ack")

    async def drain_to_seq(self, seq, timeout=RECV_TIMEOUT):
        """Consume broadcasts until the given seq has been observed."""
        while not self.seqs_seen or self.seqs_seen[-1] < seq:
            await self.recv(timeout)

    def _fold(self, msg):
        mtype = msg.get("type", "")
        if not mtype.startswith("poi."):
            return
        self.seqs_seen.append(msg["seq"])
        if mtype in ("poi.create", "poi.update"):
            poi = msg["poi"]
            self.pois[poi["id"]] = poi
        elif mtype == "poi.track":
            poi = self.pois[msg["id"]]
            point = msg["point"]
            poi["track"].append(point)
            poi["lat"] = point["lat"]
            poi["lon"] = point["lon"]
            poi["alt"] = point["alt"]
            poi["updated_ms"] = point["ts_ms"]
            poi["version"] += 1
        elif mtype == "poi.delete":
            self.pois.pop(msg["id"], None)

    def snapshot_json(self):
        """Canonical bytes of the folded state; comparable with the
        server store's snapshot_json()."""
        ordered = [self.pois[k] for k in sorted(self.pois)]
        return json.dumps(ordered, sort_keys=True,
                          separators=(",", ":")).encode("utf-8")

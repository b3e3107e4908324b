import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { SnapshotBody } from "../src/protocol.js";
import { ServiceClient, type WebSocketLike } from "../src/transport.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function ackFor(body: SnapshotBody) {
  return {
    ok: true,
    preview: body.poses.map((p) => p.word_id),
    mode: "collaborate",
    settle_deadline_ms: 1000,
    seq: 1,
  };
}

class FakeSocket implements WebSocketLike {
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;
  closed = false;
  close(): void {
    this.closed = true;
  }
}

function body(...ids: string[]): SnapshotBody {
  return {
    poses: ids.map((word_id) => ({
      word_id,
      center: [0, 0] as [number, number],
      rotation: 0,
      width: 60,
      height: 20,
    })),
  };
}

describe("ServiceClient", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("debounces: one POST per window, latest pose set wins", async () => {
    const posts: SnapshotBody[] = [];
    const fetchFn = vi.fn(async (_url: RequestInfo | URL, init?: RequestInit) => {
      const parsed = JSON.parse(String(init!.body)) as SnapshotBody;
      posts.push(parsed);
      return jsonResponse(ackFor(parsed));
    });
    const client = new ServiceClient("http://svc", "default", {
      fetchFn: fetchFn as unknown as typeof fetch,
      debounceMs: 150,
    });
    client.queueSnapshot(body("human"));
    client.queueSnapshot(body("human", "memory"));
    client.queueSnapshot(body("memory"));
    await vi.advanceTimersByTimeAsync(149);
    expect(posts).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(2);
    expect(posts).toHaveLength(1);
    expect(posts[0]!.poses.map((p) => p.word_id)).toEqual(["memory"]);
  });

  it("queues the latest slate while offline and flushes on recovery", async () => {
    let reachable = false;
    const posts: SnapshotBody[] = [];
    const fetchFn = vi.fn(async (_url: RequestInfo | URL, init?: RequestInit) => {
      if (!reachable) throw new TypeError("fetch failed");
      const parsed = JSON.parse(String(init!.body)) as SnapshotBody;
      posts.push(parsed);
      return jsonResponse(ackFor(parsed));
    });
    const status: boolean[] = [];
    const client = new ServiceClient("http://svc", "default", {
      fetchFn: fetchFn as unknown as typeof fetch,
      debounceMs: 10,
      retryMs: 100,
    });
    client.onConnection = (online) => status.push(online);

    client.queueSnapshot(body("human"));
    await vi.advanceTimersByTimeAsync(11);
    expect(status).toEqual([false]);
    client.queueSnapshot(body("human", "memory")); // newer slate while offline
    await vi.advanceTimersByTimeAsync(11);

    reachable = true;
    await vi.advanceTimersByTimeAsync(120); // retry timer fires
    expect(posts).toHaveLength(1);
    expect(posts[0]!.poses.map((p) => p.word_id)).toEqual(["human", "memory"]);
    expect(status.at(-1)).toBe(true);
  });

  it("streams events through the sequencer and reconnects after close", async () => {
    const sockets: FakeSocket[] = [];
    const client = new ServiceClient("http://svc", "default", {
      fetchFn: vi.fn() as unknown as typeof fetch,
      wsFactory: () => {
        const s = new FakeSocket();
        sockets.push(s);
        return s;
      },
      reconnectBaseMs: 50,
    });
    const seen: number[] = [];
    client.onEvent = (ev) => seen.push(ev.seq);

    client.connectEvents();
    expect(sockets).toHaveLength(1);
    sockets[0]!.onopen?.();
    const make = (seq: number) =>
      JSON.stringify({ schema_version: 1, session: "default", seq, ts_ms: 0, type: "snapshot_accepted", data: {} });
    sockets[0]!.onmessage?.({ data: make(1) });
    sockets[0]!.onmessage?.({ data: make(2) });
    expect(seen).toEqual([1, 2]);

    sockets[0]!.onclose?.();
    await vi.advanceTimersByTimeAsync(60);
    expect(sockets).toHaveLength(2); // reconnected
    sockets[1]!.onopen?.();
    sockets[1]!.onmessage?.({ data: make(2) }); // stale replay is dropped
    sockets[1]!.onmessage?.({ data: make(3) });
    expect(seen).toEqual([1, 2, 3]);
  });

  it("idle flush drains buffered events so a response is never stuck", async () => {
    const socket = new FakeSocket();
    const client = new ServiceClient("http://svc", "default", {
      fetchFn: vi.fn() as unknown as typeof fetch,
      wsFactory: () => socket,
    });
    const seen: Array<[number, string]> = [];
    client.onEvent = (ev) => seen.push([ev.seq, ev.type]);
    client.connectEvents();
    socket.onopen?.();
    const make = (seq: number, type: string) =>
      JSON.stringify({ schema_version: 1, session: "default", seq, ts_ms: 0, type, data: {} });
    socket.onmessage?.({ data: make(1, "snapshot_accepted") });
    socket.onmessage?.({ data: make(4, "response") }); // gap: 2 and 3 were dropped server-side
    expect(seen).toEqual([[1, "snapshot_accepted"]]);
    await vi.advanceTimersByTimeAsync(300);
    expect(seen).toEqual([
      [1, "snapshot_accepted"],
      [4, "response"],
    ]);
  });
});

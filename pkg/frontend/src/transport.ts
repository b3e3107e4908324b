import { debounce, type Debounced } from "./debounce.js";
import type { SnapshotAck, SnapshotBody, StateView, VocabTile, WireEvent } from "./protocol.js";
import { EventSequencer } from "./sequencer.js";

export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export interface TransportDeps {
  fetchFn?: typeof fetch;
  wsFactory?: (url: string) => WebSocketLike;
  debounceMs?: number;
  retryMs?: number;
  reconnectBaseMs?: number;
}

export interface SnapshotOutcome {
  ack?: SnapshotAck;
  queued: boolean;
}

const DEBOUNCE_MS = 150;

/**
 * HTTP + WebSocket client for the slate service.
 *
 * Snapshot posts are debounced (one per window, latest pose set wins).
 * When the service is unreachable the latest pose set is queued locally
 * and flushed as soon as a retry succeeds; subscribers learn about both
 * transitions through onConnection.
 */
export class ServiceClient {
  readonly baseUrl: string;
  readonly session: string;
  onAck: ((ack: SnapshotAck) => void) | null = null;
  onEvent: ((ev: WireEvent) => void) | null = null;
  onConnection: ((online: boolean) => void) | null = null;

  private fetchFn: typeof fetch;
  private wsFactory: (url: string) => WebSocketLike;
  private sendDebounced: Debounced<[SnapshotBody]>;
  private pendingBody: SnapshotBody | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private retryMs: number;
  private reconnectBaseMs: number;
  private reconnectAttempt = 0;
  private socket: WebSocketLike | null = null;
  private sequencer = new EventSequencer();
  private idleFlush: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  constructor(baseUrl: string, session = "default", deps: TransportDeps = {}) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.session = session;
    this.fetchFn = deps.fetchFn ?? fetch.bind(globalThis);
    this.wsFactory =
      deps.wsFactory ??
      ((url: string) => new WebSocket(url) as unknown as WebSocketLike);
    this.retryMs = deps.retryMs ?? 1000;
    this.reconnectBaseMs = deps.reconnectBaseMs ?? 500;
    this.sendDebounced = debounce((body: SnapshotBody) => {
      void this.postNow(body);
    }, deps.debounceMs ?? DEBOUNCE_MS);
  }

  private url(path: string): string {
    const sep = path.includes("?") ? "&" : "?";
    return `${this.baseUrl}${path}${sep}session=${encodeURIComponent(this.session)}`;
  }

  async fetchState(): Promise<StateView> {
    const resp = await this.fetchFn(this.url("/state"));
    if (!resp.ok) throw new Error(`GET /state -> ${resp.status}`);
    return (await resp.json()) as StateView;
  }

  async fetchVocabulary(): Promise<VocabTile[]> {
    const resp = await this.fetchFn(`${this.baseUrl}/vocabulary`);
    if (!resp.ok) throw new Error(`GET /vocabulary -> ${resp.status}`);
    const body = (await resp.json()) as { tiles: VocabTile[] };
    return body.tiles;
  }

  /** Debounced snapshot send; at most one POST per debounce window. */
  queueSnapshot(body: SnapshotBody): void {
    this.sendDebounced(body);
  }

  flushSnapshots(): void {
    this.sendDebounced.flush();
  }

  private async postNow(body: SnapshotBody): Promise<SnapshotOutcome> {
    try {
      const resp = await this.fetchFn(this.url("/snapshot"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
      if (!resp.ok) {
        // client errors are final (bad word id, closed session); surface, don't queue
        const detail = await resp.text();
        throw Object.assign(new Error(`POST /snapshot -> ${resp.status}: ${detail}`), {
          final: resp.status < 500,
        });
      }
      const ack = (await resp.json()) as SnapshotAck;
      this.pendingBody = null;
      this.onConnection?.(true);
      this.onAck?.(ack);
      return { ack, queued: false };
    } catch (err) {
      if ((err as { final?: boolean }).final) throw err;
      // transport trouble: remember the latest slate and retry until it lands
      this.pendingBody = body;
      this.onConnection?.(false);
      this.scheduleRetry();
      return { queued: true };
    }
  }

  private scheduleRetry(): void {
    if (this.retryTimer !== null || this.closed) return;
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      if (this.pendingBody !== null) {
        void this.postNow(this.pendingBody);
      }
    }, this.retryMs);
  }

  /** Open the event stream; reconnects with backoff until close() is called. */
  connectEvents(): void {
    if (this.closed) return;
    const wsUrl =
      this.baseUrl.replace(/^http/, "ws") +
      `/ws?session=${encodeURIComponent(this.session)}`;
    const socket = this.wsFactory(wsUrl);
    this.socket = socket;
    socket.onopen = () => {
      this.reconnectAttempt = 0;
      this.onConnection?.(true);
      if (this.pendingBody !== null) {
        void this.postNow(this.pendingBody);
      }
    };
    socket.onmessage = (message) => {
      let event: WireEvent;
      try {
        event = JSON.parse(message.data) as WireEvent;
      } catch {
        return;
      }
      for (const ready of this.sequencer.push(event)) {
        this.onEvent?.(ready);
      }
      if (this.idleFlush !== null) clearTimeout(this.idleFlush);
      this.idleFlush = setTimeout(() => {
        for (const ready of this.sequencer.flush()) {
          this.onEvent?.(ready);
        }
      }, 250);
    };
    socket.onclose = () => {
      if (this.closed) return;
      this.onConnection?.(false);
      const delay = Math.min(8000, this.reconnectBaseMs * 2 ** this.reconnectAttempt);
      this.reconnectAttempt += 1;
      setTimeout(() => this.connectEvents(), delay);
    };
    socket.onerror = () => {
      /* onclose follows */
    };
  }

  close(): void {
    this.closed = true;
    this.sendDebounced.cancel();
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    if (this.idleFlush !== null) clearTimeout(this.idleFlush);
    this.socket?.close();
  }
}

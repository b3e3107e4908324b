import type { WireEvent } from "./protocol.js";

// Applies events in sequence-number order. Per-connection delivery is
// already ordered, but sequence numbers may legitimately jump (a late
// joiner first gets the replayed latest response; backpressure may drop
// non-response events server-side), so contiguity cannot be demanded.
// A small sorted buffer smooths transient inversions; anything older
// than the last emitted event is stale and dropped.
const BUFFER_DEPTH = 4;

export class EventSequencer {
  private lastEmitted: number | null = null;
  private pending: WireEvent[] = [];

  push(event: WireEvent): WireEvent[] {
    if (this.lastEmitted !== null && event.seq <= this.lastEmitted) {
      return []; // stale duplicate (e.g. replayed response after reconnect)
    }
    if (this.pending.some((p) => p.seq === event.seq)) {
      return [];
    }
    this.pending.push(event);
    this.pending.sort((a, b) => a.seq - b.seq);

    const out: WireEvent[] = [];
    while (this.pending.length > 0) {
      const head = this.pending[0]!;
      const contiguous = this.lastEmitted === null || head.seq === this.lastEmitted + 1;
      if (contiguous || this.pending.length > BUFFER_DEPTH) {
        out.push(head);
        this.lastEmitted = head.seq;
        this.pending.shift();
      } else {
        break;
      }
    }
    return out;
  }

  /** Drain everything still buffered, in order (idle streams must not hold a response hostage). */
  flush(): WireEvent[] {
    const out = this.pending;
    this.pending = [];
    if (out.length > 0) {
      this.lastEmitted = out[out.length - 1]!.seq;
    }
    return out;
  }
}

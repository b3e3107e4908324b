// Wire types for the slatepoet service API (see docs/interfaces.md in the
// repository root). The browser never computes reading order itself; the
// preview always comes back from the server.

export type Mode = "interpret" | "collaborate" | "ideate" | "analogy";

export const MODES: Mode[] = ["interpret", "collaborate", "ideate", "analogy"];

export interface WireEvent {
  schema_version: number;
  session: string;
  seq: number;
  ts_ms: number;
  type:
    | "snapshot_accepted"
    | "settle_countdown"
    | "submission"
    | "chain_started"
    | "response"
    | "error";
  data: Record<string, unknown>;
}

export interface StateView {
  schema_version: number;
  session: string;
  mode: Mode;
  latest_response: string | null;
  latest_response_mode: Mode | null;
  preview: string[];
  seq: number;
  closed: boolean;
}

export interface WirePose {
  word_id: string;
  center: [number, number];
  rotation: number;
  width: number;
  height: number;
}

export interface SnapshotBody {
  poses: WirePose[];
}

export interface SnapshotAck {
  ok: boolean;
  preview: string[];
  mode: Mode;
  settle_deadline_ms: number | null;
  seq: number;
}

export interface VocabTile {
  word_id: string;
  text: string;
  attach_left: boolean;
  kind: "word" | "mode-marker";
  mode: Mode | null;
}

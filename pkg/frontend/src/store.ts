import type { Mode, StateView, VocabTile, WireEvent, WirePose } from "./protocol.js";

// Slate geometry, in screen pixels (y grows downward on screen; the wire
// format is y-up, so poses are flipped on the way out, see posesBody).
export const SLATE_W = 760;
export const SLATE_H = 420;
export const TILE_W = 60;
export const TILE_H = 20;
// a docked mode marker sits in a reserved strip at the slate's right edge
export const DOCK_X = SLATE_W - TILE_W / 2 - 8;
export const DOCK_Y = 30;

export type Connection = "connecting" | "online" | "offline";

export interface SlateTile {
  wordId: string;
  text: string;
  x: number; // tile center, screen coordinates within the slate
  y: number;
  rotation: number; // degrees clockwise on screen; 0 = upright
  selected: boolean;
}

export interface HistoryEntry {
  poem: string;
  mode: Mode;
  text: string;
}

export interface UiState {
  vocabulary: VocabTile[];
  palette: string[]; // word tile ids not currently on the slate
  slate: SlateTile[];
  dockedMode: Mode | null;
  activeMode: Mode;
  countdownMs: number | null;
  busy: boolean; // a chain is running; keep the tone quiet, no urgency
  latestResponse: string | null;
  latestResponseMode: Mode | null;
  preview: string[]; // server-ordered tokens; never computed locally
  history: HistoryEntry[];
  notice: string | null;
  connection: Connection;
}

export function initialState(): UiState {
  return {
    vocabulary: [],
    palette: [],
    slate: [],
    dockedMode: null,
    activeMode: "collaborate",
    countdownMs: null,
    busy: false,
    latestResponse: null,
    latestResponseMode: null,
    preview: [],
    history: [],
    notice: null,
    connection: "connecting",
  };
}

export function loadVocabulary(state: UiState, tiles: VocabTile[]): UiState {
  const words = tiles.filter((t) => t.kind === "word").map((t) => t.word_id);
  return { ...state, vocabulary: tiles, palette: words };
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

function clampToSlate(x: number, y: number): [number, number] {
  return [clamp(x, TILE_W / 2, SLATE_W - TILE_W / 2), clamp(y, TILE_H / 2, SLATE_H - TILE_H / 2)];
}

function tileText(state: UiState, wordId: string): string {
  const tile = state.vocabulary.find((t) => t.word_id === wordId);
  return tile ? tile.text : wordId;
}

export function placeTile(state: UiState, wordId: string, x: number, y: number): UiState {
  if (!state.palette.includes(wordId)) return state;
  const [cx, cy] = clampToSlate(x, y);
  return {
    ...state,
    palette: state.palette.filter((w) => w !== wordId),
    slate: [
      ...state.slate,
      { wordId, text: tileText(state, wordId), x: cx, y: cy, rotation: 0, selected: false },
    ],
  };
}

export function moveTile(state: UiState, wordId: string, x: number, y: number): UiState {
  const [cx, cy] = clampToSlate(x, y);
  return {
    ...state,
    slate: state.slate.map((t) => (t.wordId === wordId ? { ...t, x: cx, y: cy } : t)),
  };
}

export function rotateTile(state: UiState, wordId: string, byDegrees: number): UiState {
  return {
    ...state,
    slate: state.slate.map((t) =>
      t.wordId === wordId ? { ...t, rotation: (((t.rotation + byDegrees) % 360) + 360) % 360 } : t,
    ),
  };
}

export function removeTile(state: UiState, wordId: string): UiState {
  if (!state.slate.some((t) => t.wordId === wordId)) return state;
  return {
    ...state,
    slate: state.slate.filter((t) => t.wordId !== wordId),
    palette: [...state.palette, wordId],
  };
}

export function selectTile(state: UiState, wordId: string | null): UiState {
  return {
    ...state,
    slate: state.slate.map((t) => ({ ...t, selected: t.wordId === wordId })),
  };
}

/** Dock a mode marker (replacing any docked one); null removes it. */
export function dockMode(state: UiState, mode: Mode | null): UiState {
  return { ...state, dockedMode: mode };
}

/** Spin every slate tile half a turn in place, flipping the poem's reading direction. */
export function flipAllTiles(state: UiState): UiState {
  return {
    ...state,
    slate: state.slate.map((t) => ({ ...t, rotation: (t.rotation + 180) % 360 })),
  };
}

/**
 * Full pose set for POST /snapshot. Screen coordinates are y-down and
 * rotations clockwise; the wire is y-up with counterclockwise radians,
 * so both flip here and nowhere else.
 */
export function posesBody(state: UiState): { poses: WirePose[] } {
  const poses: WirePose[] = state.slate.map((t) => ({
    word_id: t.wordId,
    center: [t.x, SLATE_H - t.y],
    rotation: (-t.rotation * Math.PI) / 180,
    width: TILE_W,
    height: TILE_H,
  }));
  if (state.dockedMode) {
    poses.push({
      word_id: `mode_${state.dockedMode}`,
      center: [DOCK_X, SLATE_H - DOCK_Y],
      rotation: 0,
      width: TILE_W,
      height: TILE_H,
    });
  }
  return { poses };
}

// ---------------------------------------------------------------------------
// server -> ui
// ---------------------------------------------------------------------------

export function applyStateView(state: UiState, view: StateView): UiState {
  return {
    ...state,
    activeMode: view.mode,
    latestResponse: view.latest_response ?? state.latestResponse,
    latestResponseMode: view.latest_response_mode ?? state.latestResponseMode,
    preview: view.preview,
  };
}

export function applyEvent(state: UiState, event: WireEvent): UiState {
  const data = event.data as Record<string, any>;
  switch (event.type) {
    case "snapshot_accepted":
      return { ...state, preview: (data.preview as string[]) ?? state.preview };
    case "settle_countdown":
      return { ...state, countdownMs: (data.remaining_ms as number) ?? null };
    case "submission":
      return { ...state, countdownMs: null };
    case "chain_started":
      return { ...state, busy: true };
    case "response": {
      const entry: HistoryEntry = {
        poem: String(data.poem ?? ""),
        mode: (data.mode as Mode) ?? state.activeMode,
        text: String(data.text ?? ""),
      };
      return {
        ...state,
        busy: false,
        latestResponse: entry.text,
        latestResponseMode: entry.mode,
        history: [...state.history, entry],
        notice: null,
      };
    }
    case "error":
      return { ...state, busy: false, notice: String(data.message ?? "something went wrong") };
    default:
      return state;
  }
}

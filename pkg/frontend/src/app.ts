import { MODES, type Mode } from "./protocol.js";
import {
  SLATE_H,
  SLATE_W,
  applyEvent,
  applyStateView,
  dockMode,
  flipAllTiles,
  initialState,
  loadVocabulary,
  moveTile,
  placeTile,
  posesBody,
  removeTile,
  rotateTile,
  selectTile,
  type UiState,
} from "./store.js";
import type { ServiceClient } from "./transport.js";

const MODE_GLYPHS: Record<Mode, string> = {
  interpret: "◐",
  collaborate: "⇄",
  ideate: "✶",
  analogy: "≈",
};

/**
 * The virtual slate. All state lives in a single UiState; every mutation
 * re-renders and (for slate changes) queues one debounced snapshot POST.
 * Reading order is never computed here; the preview strip shows whatever
 * the server said last.
 */
export class SlateApp {
  state: UiState = initialState();
  private root: HTMLElement;
  private client: ServiceClient;
  private countdownTimer: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement, client: ServiceClient) {
    this.root = root;
    this.client = client;
    client.onEvent = (event) => {
      this.state = applyEvent(this.state, event);
      if (event.type === "settle_countdown") this.armCountdown();
      this.render();
    };
    client.onAck = (ack) => {
      this.state = { ...this.state, preview: ack.preview, activeMode: ack.mode };
      this.render();
    };
    client.onConnection = (online) => {
      this.state = { ...this.state, connection: online ? "online" : "offline" };
      this.render();
    };
  }

  async start(): Promise<void> {
    this.renderSkeleton();
    try {
      const [tiles, view] = await Promise.all([
        this.client.fetchVocabulary(),
        this.client.fetchState(),
      ]);
      this.state = applyStateView(loadVocabulary(this.state, tiles), view);
      this.state = { ...this.state, connection: "online" };
    } catch {
      this.state = { ...this.state, connection: "offline", notice: "cannot reach the slate service" };
    }
    this.client.connectEvents();
    this.render();
  }

  // ----- user gestures (also driven directly by tests) -----

  placeWord(wordId: string, x: number, y: number): void {
    this.mutate(placeTile(this.state, wordId, x, y));
  }

  moveWord(wordId: string, x: number, y: number): void {
    this.mutate(moveTile(this.state, wordId, x, y));
  }

  rotateWord(wordId: string, byDegrees: number): void {
    this.mutate(rotateTile(this.state, wordId, byDegrees));
  }

  returnWord(wordId: string): void {
    this.mutate(removeTile(this.state, wordId));
  }

  flipArrangement(): void {
    this.mutate(flipAllTiles(this.state));
  }

  setDockedMode(mode: Mode | null): void {
    this.mutate(dockMode(this.state, mode));
  }

  private mutate(next: UiState): void {
    if (next === this.state) return;
    this.state = next;
    this.client.queueSnapshot(posesBody(this.state));
    this.render();
  }

  private armCountdown(): void {
    if (this.countdownTimer !== null) clearInterval(this.countdownTimer);
    this.countdownTimer = setInterval(() => {
      if (this.state.countdownMs === null) return;
      const next = Math.max(0, this.state.countdownMs - 100);
      this.state = { ...this.state, countdownMs: next === 0 ? null : next };
      this.renderCountdown();
    }, 100);
  }

  // ----- rendering -----

  private el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    cls: string,
    text = "",
  ): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    node.className = cls;
    if (text) node.textContent = text;
    return node;
  }

  private renderSkeleton(): void {
    this.root.innerHTML = `
      <header class="bar">
        <span class="title">slate</span>
        <span class="mode-indicator" data-role="mode"></span>
        <span class="connection" data-role="connection"></span>
      </header>
      <div class="columns">
        <aside class="palette" data-role="palette"></aside>
        <main>
          <div class="slate" data-role="slate" style="width:${SLATE_W}px;height:${SLATE_H}px"></div>
          <div class="preview" data-role="preview"></div>
          <div class="countdown" data-role="countdown"></div>
          <div class="controls">
            <span class="dock-label">mode:</span>
            <span data-role="dock"></span>
            <button data-role="flip" title="spin every tile half a turn">flip poem</button>
          </div>
        </main>
        <aside class="response-pane">
          <div class="response" data-role="response"></div>
          <div class="notice" data-role="notice"></div>
          <details class="history"><summary>past responses</summary>
            <ul data-role="history"></ul>
          </details>
        </aside>
      </div>`;
    this.root.querySelector<HTMLButtonElement>('[data-role="flip"]')!.onclick = () =>
      this.flipArrangement();
  }

  private q(role: string): HTMLElement {
    return this.root.querySelector(`[data-role="${role}"]`) as HTMLElement;
  }

  render(): void {
    if (!this.root.querySelector('[data-role="slate"]')) this.renderSkeleton();
    this.renderPalette();
    this.renderSlate();
    this.renderDock();
    this.renderCountdown();
    this.q("mode").textContent = `${MODE_GLYPHS[this.state.activeMode]} ${this.state.activeMode}`;
    this.q("connection").textContent = this.state.connection;
    this.q("connection").dataset.state = this.state.connection;
    this.q("preview").textContent = this.state.preview.length
      ? `reads: ${this.state.preview.join(" · ")}`
      : "";
    this.renderResponse();
  }

  private renderPalette(): void {
    const palette = this.q("palette");
    palette.innerHTML = "";
    for (const wordId of this.state.palette) {
      const tile = this.state.vocabulary.find((t) => t.word_id === wordId);
      const chip = this.el("button", "chip", tile?.text ?? wordId);
      chip.dataset.word = wordId;
      chip.onclick = () => this.placeWord(wordId, SLATE_W / 2, SLATE_H / 2);
      palette.appendChild(chip);
    }
  }

  private renderSlate(): void {
    const slate = this.q("slate");
    slate.innerHTML = "";
    for (const tile of this.state.slate) {
      const node = this.el("div", tile.selected ? "tile selected" : "tile", tile.text);
      node.dataset.word = tile.wordId;
      node.style.left = `${tile.x}px`;
      node.style.top = `${tile.y}px`;
      node.style.transform = `translate(-50%,-50%) rotate(${tile.rotation}deg)`;
      node.onpointerdown = (down) => this.beginDrag(tile.wordId, node, down);
      node.ondblclick = () => this.rotateWord(tile.wordId, 180);
      node.oncontextmenu = (ev) => {
        ev.preventDefault();
        this.returnWord(tile.wordId);
      };
      slate.appendChild(node);
    }
  }

  private beginDrag(wordId: string, node: HTMLElement, down: PointerEvent): void {
    down.preventDefault();
    this.state = selectTile(this.state, wordId);
    const slateBox = this.q("slate").getBoundingClientRect();
    const onMove = (move: PointerEvent) => {
      this.moveWord(wordId, move.clientX - slateBox.left, move.clientY - slateBox.top);
    };
    const onUp = () => {
      window.removeEventListener("pointermove", onMove);
      window.removeEventListener("pointerup", onUp);
      this.state = selectTile(this.state, null);
      this.render();
    };
    window.addEventListener("pointermove", onMove);
    window.addEventListener("pointerup", onUp);
  }

  private renderDock(): void {
    const dock = this.q("dock");
    dock.innerHTML = "";
    for (const mode of MODES) {
      const button = this.el(
        "button",
        this.state.dockedMode === mode ? "marker docked" : "marker",
        `${MODE_GLYPHS[mode]} ${mode}`,
      );
      button.dataset.mode = mode;
      button.onclick = () => this.setDockedMode(this.state.dockedMode === mode ? null : mode);
      dock.appendChild(button);
    }
  }

  private renderCountdown(): void {
    const node = this.q("countdown");
    if (this.state.countdownMs !== null) {
      node.textContent = `listening… settles in ${(this.state.countdownMs / 1000).toFixed(1)}s`;
    } else if (this.state.busy) {
      node.textContent = "thinking…"; // quiet busy state, nothing spins
    } else {
      node.textContent = "";
    }
  }

  private renderResponse(): void {
    const pane = this.q("response");
    pane.textContent = this.state.latestResponse ?? "(the slate has not answered yet)";
    pane.dataset.mode = this.state.latestResponseMode ?? "";
    this.q("notice").textContent = this.state.notice ?? "";
    const history = this.q("history");
    history.innerHTML = "";
    for (const entry of [...this.state.history].reverse()) {
      const item = this.el("li", "history-entry");
      item.appendChild(this.el("span", "history-mode", entry.mode));
      item.appendChild(this.el("blockquote", "history-poem", entry.poem));
      item.appendChild(this.el("p", "history-text", entry.text));
      history.appendChild(item);
    }
  }
}

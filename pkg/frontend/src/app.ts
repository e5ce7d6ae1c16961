// Page wiring: upload, command box, candidate dialog, undo and export.
// The server is the single source of truth; the page only renders the
// event list that came back with the last response.

import { ApiError, formatForFilename, ScoreTalkClient } from "./api.js";
import { changedNoteIndices, drawRoll, layoutRoll } from "./roll.js";
import { Transcript } from "./transcript.js";
import type { Candidate, CommandResponse, ScoreEvent, ScoreMeta, Snapshot } from "./types.js";

const HIGHLIGHT_MS = 2000;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

class App {
  private client: ScoreTalkClient;
  private sessionId: string | null = null;
  private events: ScoreEvent[] = [];
  private meta: ScoreMeta | null = null;
  private transcript = new Transcript();
  private highlight = new Set<number>();
  private highlightTimer: ReturnType<typeof setTimeout> | null = null;
  private hasEdits = false;
  private busy = false;

  private canvas = el<HTMLCanvasElement>("roll");
  private transcriptPane = el<HTMLDivElement>("transcript");
  private commandInput = el<HTMLInputElement>("command");
  private sendButton = el<HTMLButtonElement>("send");
  private undoBtn = el<HTMLButtonElement>("undo");
  private exportJsonBtn = el<HTMLButtonElement>("export-json");
  private exportMidiBtn = el<HTMLButtonElement>("export-midi");
  private fileInput = el<HTMLInputElement>("file");
  private dialog = el<HTMLDivElement>("dialog");
  private dialogList = el<HTMLDivElement>("dialog-list");
  private banner = el<HTMLDivElement>("banner");

  constructor(baseUrl: string) {
    this.client = new ScoreTalkClient(baseUrl);
    this.sendButton.addEventListener("click", () => void this.onSend());
    this.commandInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter") void this.onSend();
    });
    this.fileInput.addEventListener("change", () => void this.onFile());
    this.undoBtn.addEventListener("click", () => void this.onUndo());
    this.exportJsonBtn.addEventListener("click", () => void this.onExport("json"));
    this.exportMidiBtn.addEventListener("click", () => void this.onExport("midi"));
    el<HTMLButtonElement>("dialog-cancel").addEventListener("click", () => this.closeDialog());
    this.refreshControls();
  }

  async start(): Promise<void> {
    try {
      this.sessionId = await this.client.createSession();
      this.note(`session ${this.sessionId.slice(0, 8)} ready — load a score to begin`);
    } catch (error) {
      this.fail(`cannot reach the service: ${describe(error)}`);
    }
    this.render();
  }

  private note(text: string): void {
    this.banner.textContent = text;
    this.banner.className = "banner";
  }

  private fail(text: string): void {
    this.banner.textContent = text;
    this.banner.className = "banner error";
  }

  private refreshControls(): void {
    const ready = this.sessionId !== null && !this.busy;
    this.commandInput.disabled = !ready || this.meta === null;
    this.sendButton.disabled = this.commandInput.disabled;
    this.undoBtn.disabled = !ready || !this.hasEdits;
    const exportable = ready && this.meta !== null;
    this.exportJsonBtn.disabled = !exportable;
    this.exportMidiBtn.disabled = !exportable;
  }

  private render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || !this.meta) return;
    const layout = layoutRoll(this.events, this.meta);
    this.canvas.width = Math.max(layout.width + 48, 400);
    this.canvas.height = Math.max(layout.height, 120);
    drawRoll(ctx, layout, this.meta, this.highlight);
    this.transcriptPane.innerHTML = "";
    for (const entry of this.transcript.entries) {
      const line = document.createElement("div");
      line.className = entry.tone === "error" ? "line error" : "line";
      line.textContent = `${entry.speaker}: ${entry.text}`;
      this.transcriptPane.appendChild(line);
    }
    this.transcriptPane.scrollTop = this.transcriptPane.scrollHeight;
  }

  private takeSnapshot(snapshot: Snapshot, highlightChanges: boolean): void {
    const previous = this.events;
    this.events = snapshot.events;
    this.meta = snapshot.meta;
    if (this.highlightTimer) {
      clearTimeout(this.highlightTimer);
      this.highlightTimer = null;
    }
    this.highlight = new Set(highlightChanges ? changedNoteIndices(previous, snapshot.events) : []);
    if (this.highlight.size > 0) {
      this.highlightTimer = setTimeout(() => {
        this.highlight = new Set();
        this.render();
      }, HIGHLIGHT_MS);
    }
  }

  private async onFile(): Promise<void> {
    const file = this.fileInput.files?.[0];
    if (!file || !this.sessionId) return;
    this.busy = true;
    this.refreshControls();
    try {
      const format = formatForFilename(file.name);
      const data = await file.arrayBuffer();
      const response = await this.client.uploadScore(this.sessionId, data, format);
      this.takeSnapshot(response, false);
      this.hasEdits = false;
      this.transcript.computer(`loaded ${file.name}: ${response.report.eventCount} events`);
      const warnings = response.report.warnings;
      if (warnings.length > 0) {
        this.note(`loaded with warnings: ${warnings.join("; ")}`);
      } else {
        this.note(`loaded ${file.name}`);
      }
    } catch (error) {
      this.fail(`load failed: ${describe(error)}`);
    } finally {
      this.busy = false;
      this.refreshControls();
      this.render();
    }
  }

  private async onSend(): Promise<void> {
    const text = this.commandInput.value.trim();
    if (!text || !this.sessionId || this.busy) return;
    this.commandInput.value = "";
    this.transcript.user(text);
    this.busy = true;
    this.refreshControls();
    this.render();
    try {
      const response = await this.client.sendCommand(this.sessionId, text);
      this.applyResponse(response);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.transcript.computer("answer the open question first (pick a candidate or undo)", "error");
      } else {
        this.transcript.computer(describe(error), "error");
      }
    } finally {
      this.busy = false;
      this.refreshControls();
      this.render();
    }
  }

  private applyResponse(response: CommandResponse): void {
    const outcome = response.outcome;
    if (response.echo) {
      this.transcript.computer(response.echo, outcome.status === "error" ? "error" : "normal");
    }
    if (outcome.status === "applied") {
      this.takeSnapshot(response, true);
      this.hasEdits = true;
      this.note(outcome.message);
      this.closeDialog();
    } else if (outcome.status === "ambiguous") {
      this.note(outcome.message);
      this.openDialog(outcome.candidates ?? []);
    } else {
      if (!response.echo) {
        this.transcript.computer(outcome.message, "error");
      }
      this.fail(outcome.message);
    }
  }

  private openDialog(candidates: Candidate[]): void {
    this.dialogList.innerHTML = "";
    for (const candidate of candidates) {
      const button = document.createElement("button");
      button.textContent = `${candidate.index}: ${candidate.describe}`;
      button.addEventListener("click", () => void this.onResolve(candidate.index));
      this.dialogList.appendChild(button);
    }
    this.dialog.classList.remove("hidden");
  }

  private closeDialog(): void {
    this.dialog.classList.add("hidden");
  }

  private async onResolve(index: number): Promise<void> {
    if (!this.sessionId) return;
    this.closeDialog();
    try {
      const response = await this.client.resolveChoice(this.sessionId, index);
      this.applyResponse(response);
    } catch (error) {
      this.fail(`choice failed: ${describe(error)}`);
    }
    this.render();
  }

  private async onUndo(): Promise<void> {
    if (!this.sessionId) return;
    this.closeDialog(); // an open dialog is stale once history moves
    this.transcript.user("undo");
    try {
      const response = await this.client.undo(this.sessionId);
      if (response.outcome.status === "applied") {
        this.takeSnapshot(response, false);
        this.note(response.outcome.message);
      } else {
        this.hasEdits = false;
        this.fail(response.outcome.message);
      }
    } catch (error) {
      this.fail(`undo failed: ${describe(error)}`);
    }
    this.refreshControls();
    this.render();
  }

  private async onExport(format: "json" | "midi"): Promise<void> {
    if (!this.sessionId) return;
    try {
      const data = await this.client.exportScore(this.sessionId, format);
      const blob = new Blob([data], {
        type: format === "json" ? "application/json" : "audio/midi",
      });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = format === "json" ? "score.json" : "score.mid";
      link.click();
      URL.revokeObjectURL(link.href);
    } catch (error) {
      this.fail(`export failed: ${describe(error)}`);
    }
  }
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "http://127.0.0.1:8000";
void new App(baseUrl).start();

// Piano-roll geometry and painting. The layout is a pure function of the
// event list the server returned last; nothing musical is computed here.

import type { ScoreEvent, ScoreMeta } from "./types.js";

export interface RollOptions {
  beatWidth: number; // pixels per beat
  rowHeight: number; // pixels per semitone row
  padRows: number; // empty rows above and below the pitch range
}

export const DEFAULT_OPTIONS: RollOptions = { beatWidth: 48, rowHeight: 14, padRows: 2 };

export interface NoteRect {
  x: number;
  y: number;
  width: number;
  height: number;
  pitch: number;
  onset: number;
  dur: number;
}

export interface RollLayout {
  rects: NoteRect[];
  gridlines: number[]; // x positions of measure boundaries
  width: number;
  height: number;
  lowPitch: number;
  highPitch: number;
}

const PITCH_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];

export function pitchLabel(pitch: number, octaveOffsetK: number): string {
  const octave = Math.floor(pitch / 12) - octaveOffsetK;
  return `${PITCH_NAMES[((pitch % 12) + 12) % 12]}${octave}`;
}

export function layoutRoll(
  events: ScoreEvent[],
  meta: ScoreMeta,
  options: RollOptions = DEFAULT_OPTIONS,
): RollLayout {
  const notes = events.filter((e) => e.kind === "note" && e.pitch !== null);
  if (notes.length === 0) {
    return { rects: [], gridlines: [], width: 0, height: 0, lowPitch: 0, highPitch: 0 };
  }
  const pitches = notes.map((e) => e.pitch as number);
  const lowPitch = Math.min(...pitches) - options.padRows;
  const highPitch = Math.max(...pitches) + options.padRows;
  const totalBeats = Math.max(...notes.map((e) => e.onset + e.dur));
  const rects = notes.map((e) => ({
    x: e.onset * options.beatWidth,
    y: (highPitch - (e.pitch as number)) * options.rowHeight,
    width: e.dur * options.beatWidth,
    height: options.rowHeight,
    pitch: e.pitch as number,
    onset: e.onset,
    dur: e.dur,
  }));
  const gridlines: number[] = [];
  for (let beat = 0; beat <= totalBeats + 1e-9; beat += meta.beatsPerMeasure) {
    gridlines.push(beat * options.beatWidth);
  }
  return {
    rects,
    gridlines,
    width: totalBeats * options.beatWidth,
    height: (highPitch - lowPitch + 1) * options.rowHeight,
    lowPitch,
    highPitch,
  };
}

function eventKey(e: ScoreEvent): string {
  return `${e.pitch}@${e.onset.toFixed(9)}x${e.dur.toFixed(9)}`;
}

/** Indices (into the new list's note events) whose (pitch, onset, dur)
 * triple was not present in the previous list — the notes to highlight. */
export function changedNoteIndices(previous: ScoreEvent[], next: ScoreEvent[]): number[] {
  const seen = new Map<string, number>();
  for (const e of previous) {
    if (e.kind !== "note") continue;
    const key = eventKey(e);
    seen.set(key, (seen.get(key) ?? 0) + 1);
  }
  const changed: number[] = [];
  let noteIndex = 0;
  for (const e of next) {
    if (e.kind !== "note") continue;
    const key = eventKey(e);
    const count = seen.get(key) ?? 0;
    if (count > 0) {
      seen.set(key, count - 1);
    } else {
      changed.push(noteIndex);
    }
    noteIndex += 1;
  }
  return changed;
}

export function drawRoll(
  ctx: CanvasRenderingContext2D,
  layout: RollLayout,
  meta: ScoreMeta,
  highlighted: Set<number>,
  options: RollOptions = DEFAULT_OPTIONS,
): void {
  const labelGutter = 36;
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  if (layout.rects.length === 0) {
    ctx.fillStyle = "#888";
    ctx.fillText("no score loaded", 10, 20);
    return;
  }
  ctx.save();
  ctx.translate(labelGutter, 0);
  // alternating row shading with pitch labels on the gutter
  ctx.font = "10px system-ui, sans-serif";
  for (let pitch = layout.lowPitch; pitch <= layout.highPitch; pitch++) {
    const y = (layout.highPitch - pitch) * options.rowHeight;
    ctx.fillStyle = pitch % 2 === 0 ? "#f7f7f9" : "#ffffff";
    ctx.fillRect(0, y, layout.width, options.rowHeight);
    if (pitch % 12 === 0) {
      ctx.fillStyle = "#aaa";
      ctx.fillText(pitchLabel(pitch, meta.octaveOffsetK), -labelGutter + 4, y + options.rowHeight - 3);
    }
  }
  ctx.strokeStyle = "#d5d5dd";
  for (const x of layout.gridlines) {
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, layout.height);
    ctx.stroke();
  }
  layout.rects.forEach((rect, i) => {
    ctx.fillStyle = highlighted.has(i) ? "#ff9f43" : "#3867d6";
    ctx.fillRect(rect.x + 1, rect.y + 1, Math.max(rect.width - 2, 2), rect.height - 2);
  });
  ctx.restore();
}

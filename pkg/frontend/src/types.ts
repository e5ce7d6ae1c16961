// Wire types mirroring the service's JSON payloads.

export interface ScoreEvent {
  kind: "note" | "rest";
  pitch: number | null;
  onset: number; // absolute beats from the start of the score
  dur: number; // beats
  labels: string[];
}

export interface ScoreMeta {
  beatsPerMeasure: number;
  octaveOffsetK: number;
  tempoBPM: number;
}

export interface Candidate {
  index: number;
  describe: string;
  path: number[];
}

export type OutcomeStatus = "applied" | "ambiguous" | "clarificationNeeded" | "error";

export interface Outcome {
  status: OutcomeStatus;
  message: string;
  candidates?: Candidate[];
}

export interface Snapshot {
  score: unknown;
  events: ScoreEvent[];
  meta: ScoreMeta;
  version: number;
}

export interface CommandResponse extends Snapshot {
  outcome: Outcome;
  echo: string | null;
  program?: unknown;
}

export interface IngestReport {
  sourceFormat: string;
  eventCount: number;
  warnings: string[];
  meta: ScoreMeta;
}

export interface UploadResponse extends Snapshot {
  report: IngestReport;
}

export type ScoreFormat = "midi" | "musicxml" | "json";

// Conversation transcript state: alternating user and computer lines,
// in the order the server processed them.

export interface TranscriptEntry {
  speaker: "U" | "C";
  text: string;
  tone: "normal" | "error";
}

export class Transcript {
  readonly entries: TranscriptEntry[] = [];

  user(text: string): void {
    this.entries.push({ speaker: "U", text, tone: "normal" });
  }

  computer(text: string, tone: "normal" | "error" = "normal"): void {
    this.entries.push({ speaker: "C", text, tone });
  }

  lines(): string[] {
    return this.entries.map((e) => `${e.speaker}: ${e.text}`);
  }
}

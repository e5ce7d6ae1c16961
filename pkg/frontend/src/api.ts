// Thin client for the score service. All score logic lives server-side;
// this module only shapes requests and raises useful errors.

import type {
  CommandResponse,
  ScoreFormat,
  Snapshot,
  UploadResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ScoreTalkClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        // keep the status-line detail
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async createSession(): Promise<string> {
    const response = await this.request("/sessions", { method: "POST" });
    const body = await response.json();
    return body.sessionId as string;
  }

  async uploadScore(
    sessionId: string,
    data: ArrayBuffer | Uint8Array | string,
    format: ScoreFormat,
  ): Promise<UploadResponse> {
    const body = typeof data === "string" ? data : data instanceof Uint8Array ? data.buffer : data;
    const response = await this.request(`/sessions/${sessionId}/score`, {
      method: "POST",
      headers: {
        "X-Score-Format": format,
        "Content-Type": "application/octet-stream",
      },
      body: body as BodyInit,
    });
    return response.json();
  }

  async sendCommand(sessionId: string, text: string): Promise<CommandResponse> {
    const response = await this.request(`/sessions/${sessionId}/command`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    return response.json();
  }

  async resolveChoice(sessionId: string, index: number): Promise<CommandResponse> {
    const response = await this.request(`/sessions/${sessionId}/resolve`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ index }),
    });
    return response.json();
  }

  async undo(sessionId: string): Promise<CommandResponse> {
    const response = await this.request(`/sessions/${sessionId}/undo`, { method: "POST" });
    return response.json();
  }

  async getScore(sessionId: string): Promise<Snapshot> {
    const response = await this.request(`/sessions/${sessionId}/score`);
    return response.json();
  }

  async getHistory(sessionId: string): Promise<{ text: string; status: string; message: string }[]> {
    const response = await this.request(`/sessions/${sessionId}/history`);
    const body = await response.json();
    return body.history;
  }

  async exportScore(sessionId: string, format: "json" | "midi"): Promise<ArrayBuffer> {
    const response = await this.request(`/sessions/${sessionId}/export?format=${format}`);
    return response.arrayBuffer();
  }
}

export function formatForFilename(name: string): ScoreFormat {
  const lowered = name.toLowerCase();
  if (lowered.endsWith(".mid") || lowered.endsWith(".midi")) return "midi";
  if (lowered.endsWith(".xml") || lowered.endsWith(".musicxml")) return "musicxml";
  if (lowered.endsWith(".json")) return "json";
  throw new Error(`cannot tell the score format of ${name}`);
}

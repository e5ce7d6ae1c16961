import { describe, expect, it } from "vitest";

import { ApiError, formatForFilename, ScoreTalkClient } from "../src/api.js";

interface Captured {
  url: string;
  init?: RequestInit;
}

function stubClient(
  responses: Array<{ status?: number; body?: unknown }>,
): { client: ScoreTalkClient; calls: Captured[] } {
  const calls: Captured[] = [];
  const fetchImpl = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    const spec = responses[Math.min(calls.length - 1, responses.length - 1)];
    const status = spec.status ?? 200;
    return new Response(JSON.stringify(spec.body ?? {}), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { client: new ScoreTalkClient("http://svc:9", fetchImpl), calls };
}

describe("ScoreTalkClient", () => {
  it("creates sessions", async () => {
    const { client, calls } = stubClient([{ status: 201, body: { sessionId: "abc" } }]);
    expect(await client.createSession()).toBe("abc");
    expect(calls[0].url).toBe("http://svc:9/sessions");
    expect(calls[0].init?.method).toBe("POST");
  });

  it("uploads with the format header", async () => {
    const { client, calls } = stubClient([{ body: { report: {}, events: [] } }]);
    await client.uploadScore("abc", "{}", "json");
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(calls[0].url).toBe("http://svc:9/sessions/abc/score");
    expect(headers["X-Score-Format"]).toBe("json");
  });

  it("sends command text as JSON", async () => {
    const { client, calls } = stubClient([{ body: { outcome: { status: "applied" } } }]);
    await client.sendCommand("abc", "move the G up a half step");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({
      text: "move the G up a half step",
    });
  });

  it("sends the chosen candidate index", async () => {
    const { client, calls } = stubClient([{ body: { outcome: { status: "applied" } } }]);
    await client.resolveChoice("abc", 2);
    expect(calls[0].url).toBe("http://svc:9/sessions/abc/resolve");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({ index: 2 });
  });

  it("raises ApiError with the service detail", async () => {
    const { client } = stubClient([{ status: 409, body: { detail: "no pending ambiguity" } }]);
    await expect(client.resolveChoice("abc", 0)).rejects.toThrowError(
      new ApiError(409, "no pending ambiguity"),
    );
  });

  it("strips trailing slashes from the base url", async () => {
    const calls: Captured[] = [];
    const fetchImpl = async (url: string, init?: RequestInit) => {
      calls.push({ url, init });
      return new Response("{}", { status: 200 });
    };
    const client = new ScoreTalkClient("http://svc:9///", fetchImpl);
    await client.getScore("abc");
    expect(calls[0].url).toBe("http://svc:9/sessions/abc/score");
  });
});

describe("formatForFilename", () => {
  it("maps extensions", () => {
    expect(formatForFilename("a.mid")).toBe("midi");
    expect(formatForFilename("a.MIDI")).toBe("midi");
    expect(formatForFilename("tune.musicxml")).toBe("musicxml");
    expect(formatForFilename("tune.xml")).toBe("musicxml");
    expect(formatForFilename("tune.json")).toBe("json");
    expect(() => formatForFilename("tune.wav")).toThrow();
  });
});

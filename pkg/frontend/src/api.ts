// Thin fetch client for the bot-service HTTP API.  The UI owns no game
// logic; everything it shows comes back from these calls.

import type {
  CreateResponse,
  DecisionResponse,
  NewGameSettings,
  SessionState,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ServiceError(
      body.code ?? "unknown",
      body.message ?? response.statusText,
      response.status,
    );
  }
  return body as T;
}

export interface GameApi {
  createSession(settings: NewGameSettings): Promise<CreateResponse>;
  getState(sessionId: string, coach: boolean): Promise<SessionState>;
  decide(sessionId: string, action: "hold" | "drop"): Promise<DecisionResponse>;
  remove(sessionId: string): Promise<void>;
}

export function makeApi(baseUrl: string): GameApi {
  const root = baseUrl.replace(/\/$/, "");
  return {
    async createSession(settings) {
      const response = await fetch(`${root}/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(settings),
      });
      return parse<CreateResponse>(response);
    },
    async getState(sessionId, coach) {
      const response = await fetch(
        `${root}/sessions/${sessionId}?coach=${coach}`,
      );
      const body = await parse<{ state: SessionState }>(response);
      return body.state;
    },
    async decide(sessionId, action) {
      const response = await fetch(`${root}/sessions/${sessionId}/decision`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ action }),
      });
      return parse<DecisionResponse>(response);
    },
    async remove(sessionId) {
      await fetch(`${root}/sessions/${sessionId}`, { method: "DELETE" });
    },
  };
}

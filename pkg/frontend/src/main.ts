// App wiring: form → create session, buttons → decisions, coach toggle.
// One in-flight request per session; UI events while pending are ignored.

import { makeApi, ServiceError, type GameApi } from "./api.js";
import {
  applyCreated,
  applyDecision,
  applyError,
  freshViewModel,
  validateSettings,
  type SessionViewModel,
} from "./state.js";
import { render } from "./render.js";
import type { NewGameSettings } from "./types.js";

export interface App {
  model: SessionViewModel;
  newGame(settings: NewGameSettings): Promise<void>;
  decide(action: "hold" | "drop"): Promise<void>;
  toggleCoach(on: boolean): Promise<void>;
}

export function createApp(root: HTMLElement, api: GameApi): App {
  const app: App = {
    model: freshViewModel({ n: 2, mesh: 101, rule: "standard", seed: null }),

    async newGame(settings) {
      const problem = validateSettings(settings);
      if (problem) {
        app.model = applyError(app.model, problem);
        render(root, app.model);
        return;
      }
      app.model = { ...freshViewModel(settings), pending: true };
      render(root, app.model);
      try {
        const response = await api.createSession(settings);
        app.model = applyCreated(app.model, response.state);
      } catch (err) {
        app.model = applyError(app.model, describe(err));
      }
      render(root, app.model);
    },

    async decide(action) {
      const state = app.model.state;
      if (!state || state.phase !== "awaiting_decision" || app.model.pending) {
        return;
      }
      app.model = { ...app.model, pending: true };
      render(root, app.model);
      try {
        const response = await api.decide(state.session_id, action);
        app.model = applyDecision(app.model, response);
        if (app.model.coachVisible) {
          await refreshCoach();
        }
      } catch (err) {
        app.model = applyError(app.model, describe(err));
      }
      render(root, app.model);
    },

    async toggleCoach(on) {
      app.model = { ...app.model, coachVisible: on };
      if (on && app.model.state) {
        await refreshCoach();
      }
      render(root, app.model);
    },
  };

  async function refreshCoach(): Promise<void> {
    const state = app.model.state;
    if (!state) return;
    try {
      const coached = await api.getState(state.session_id, true);
      app.model = { ...app.model, state: coached };
    } catch (err) {
      app.model = applyError(app.model, describe(err));
    }
  }

  wireDom(root, app);
  render(root, app.model);
  return app;
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) {
    return `${err.code}: ${err.message}`;
  }
  return "service unreachable — retry in a moment";
}

function wireDom(root: HTMLElement, app: App): void {
  const form = root.querySelector("#new-game-form") as HTMLFormElement | null;
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const seedRaw = String(data.get("seed") ?? "").trim();
    void app.newGame({
      n: Number(data.get("n")),
      mesh: Number(data.get("mesh")),
      rule: String(data.get("rule")),
      seed: seedRaw === "" ? null : Number(seedRaw),
    });
  });
  root
    .querySelector("#hold-button")
    ?.addEventListener("click", () => void app.decide("hold"));
  root
    .querySelector("#drop-button")
    ?.addEventListener("click", () => void app.decide("drop"));
  const coach = root.querySelector("#coach-toggle") as HTMLInputElement | null;
  coach?.addEventListener("change", () => void app.toggleCoach(coach.checked));
  root.querySelector("#replay-button")?.addEventListener("click", () => {
    void app.newGame(app.model.settings);
  });
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const base =
    new URLSearchParams(window.location.search).get("service") ??
    "http://127.0.0.1:8000";
  createApp(root, makeApi(base));
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}

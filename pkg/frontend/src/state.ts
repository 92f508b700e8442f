// Session view-model: the last server state plus UI-only bookkeeping.
// Invariant: every game number rendered downstream comes from `state` or
// `lastResolution`, both verbatim server responses.

import type {
  DecisionResponse,
  NewGameSettings,
  RoundResolution,
  SessionState,
} from "./types.js";

export interface SessionViewModel {
  settings: NewGameSettings;
  state: SessionState | null;
  lastResolution: RoundResolution | null;
  bankrollSeries: number[]; // player-1 bankroll after each server response
  pending: boolean;
  coachVisible: boolean;
  error: string | null;
}

export function freshViewModel(settings: NewGameSettings): SessionViewModel {
  return {
    settings,
    state: null,
    lastResolution: null,
    bankrollSeries: [],
    pending: false,
    coachVisible: false,
    error: null,
  };
}

export function applyCreated(
  model: SessionViewModel,
  state: SessionState,
): SessionViewModel {
  return {
    ...model,
    state,
    lastResolution: null,
    bankrollSeries: [state.bankrolls[0]],
    pending: false,
    error: null,
  };
}

export function applyDecision(
  model: SessionViewModel,
  response: DecisionResponse,
): SessionViewModel {
  return {
    ...model,
    state: response.state,
    lastResolution: response.resolution,
    bankrollSeries: [...model.bankrollSeries, response.state.bankrolls[0]],
    pending: false,
    error: null,
  };
}

export function applyError(
  model: SessionViewModel,
  message: string,
): SessionViewModel {
  return { ...model, pending: false, error: message };
}

export function validateSettings(settings: NewGameSettings): string | null {
  if (!Number.isInteger(settings.n) || settings.n < 1) {
    return "coalition size must be a positive integer";
  }
  if (!Number.isInteger(settings.mesh) || settings.mesh < 2) {
    return "mesh must be an integer of at least 2";
  }
  if (settings.rule !== "standard" && settings.rule !== "weenie") {
    return "rule must be standard or weenie";
  }
  return null;
}

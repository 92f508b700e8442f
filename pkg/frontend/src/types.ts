// Wire types mirroring the bot-service JSON API.

export type Phase = "awaiting_decision" | "terminated";

export interface RoundResolution {
  round_index: number;
  decisions: ("hold" | "drop")[];
  hands: number[];
  winner: number | null;
  pot_before: number;
  pot_after: number;
  bankroll_deltas: number[];
  terminated: boolean;
  weenie: number | null;
}

export interface CoachInfo {
  policy_support: [number[], number][];
  best_response_threshold: number;
  opponent_value: number;
}

export interface SessionState {
  session_id: string;
  players: number;
  rule: string;
  mesh_points: number;
  phase: Phase;
  pot: number;
  round_index: number;
  player_hand: number | null;
  bankrolls: number[];
  history: RoundResolution[];
  coach?: CoachInfo;
}

export interface CreateResponse {
  session_id: string;
  state: SessionState;
}

export interface DecisionResponse {
  resolution: RoundResolution;
  state: SessionState;
}

export interface ApiError {
  code: string;
  message: string;
}

export interface NewGameSettings {
  n: number;
  mesh: number;
  rule: string;
  seed: number | null;
}

// DOM rendering: pure functions of the view-model.  Hands show as 0-100
// percentiles of the continuous model; pots and bankrolls print exactly
// as served.

import type { SessionViewModel } from "./state.js";
import type { RoundResolution } from "./types.js";

export function fmt(x: number): string {
  return Number.isInteger(x) ? x.toString() : x.toFixed(2).replace(/0+$/, "").replace(/\.$/, "");
}

export function handPercentile(hand: number): number {
  return Math.round(hand * 100);
}

export function bannerFor(resolution: RoundResolution, rule: string): string {
  const holders = resolution.decisions.filter((d) => d === "hold").length;
  if (resolution.terminated) {
    return resolution.winner === 0
      ? "You take the pot — game over"
      : `Player ${resolution.winner! + 1} takes the pot — game over`;
  }
  if (holders === 0) {
    if (rule === "weenie" && resolution.weenie !== null) {
      const who = resolution.weenie === 0 ? "You are" : `Player ${resolution.weenie + 1} is`;
      return `${who} the weenie — pot doubles to ${fmt(resolution.pot_after)}`;
    }
    return "Redeal — pot stands";
  }
  const factor = holders - 1;
  return `${holders} held — stakes ×${factor}, pot ${fmt(resolution.pot_after)}`;
}

export function render(root: HTMLElement, model: SessionViewModel): void {
  const el = (id: string) => root.querySelector(`#${id}`) as HTMLElement;
  const state = model.state;

  el("error-banner").textContent = model.error ?? "";
  el("error-banner").hidden = model.error === null;

  const table = el("table-view");
  if (!state) {
    table.hidden = true;
    return;
  }
  table.hidden = false;

  el("pot").textContent = fmt(state.pot);
  el("round").textContent = String(state.round_index);
  el("rule-badge").textContent = state.rule === "weenie" ? "Weenie" : "Standard";
  el("phase").textContent = state.phase;

  const meter = el("hand-meter") as unknown as HTMLProgressElement;
  const handLabel = el("hand-label");
  if (state.player_hand !== null) {
    meter.value = handPercentile(state.player_hand);
    handLabel.textContent = `${handPercentile(state.player_hand)} / 100`;
  } else {
    meter.value = 0;
    handLabel.textContent = "—";
  }

  el("bankrolls").innerHTML = state.bankrolls
    .map((b, i) => `<li>${i === 0 ? "You" : `Bot ${i}`}: ${fmt(b)}</li>`)
    .join("");

  el("bankroll-series").textContent = model.bankrollSeries.map(fmt).join(" → ");

  el("round-banner").textContent = model.lastResolution
    ? bannerFor(model.lastResolution, state.rule)
    : "";

  el("history").innerHTML = state.history
    .map((r) => {
      const hands = r.hands.map((h) => handPercentile(h)).join(", ");
      return `<li>round ${r.round_index + 1}: hands [${hands}] — ${bannerFor(r, state.rule)}</li>`;
    })
    .join("");

  const holdButton = el("hold-button") as HTMLButtonElement;
  const dropButton = el("drop-button") as HTMLButtonElement;
  const playable = state.phase === "awaiting_decision" && !model.pending;
  holdButton.disabled = !playable;
  dropButton.disabled = !playable;
  el("replay-offer").hidden = state.phase !== "terminated";

  const coach = el("coach-panel");
  coach.hidden = !model.coachVisible;
  if (model.coachVisible && state.coach) {
    const rows = state.coach.policy_support
      .map(([thresholds, weight]) => {
        const pct = (weight * 100).toFixed(1);
        return `<li>(${thresholds.map(fmt).join(", ")}) @ ${pct}%</li>`;
      })
      .join("");
    coach.innerHTML =
      `<h3>Coach</h3><ul>${rows}</ul>` +
      `<p>Your best response threshold: ${fmt(state.coach.best_response_threshold)}</p>` +
      `<p>Coalition edge: ${state.coach.opponent_value.toFixed(4)}</p>`;
  }
}

export function extractSnapshot(model: SessionViewModel): Record<string, unknown> {
  // the externally visible numbers a transcript replay must reproduce
  const state = model.state!;
  return {
    pot: state.pot,
    phase: state.phase,
    round_index: state.round_index,
    bankrolls: state.bankrolls,
    player_hand: state.player_hand,
    banner: model.lastResolution
      ? bannerFor(model.lastResolution, state.rule)
      : "",
    bankroll_series: model.bankrollSeries,
  };
}

/**
 * Console state and transitions.
 *
 * All engine math stays server-side: this module only validates the
 * composition widget (exactly the team constraints, nothing stricter),
 * tracks lock/exclude steering, serializes requests, and discards
 * stale responses by sequence number.
 */

import type {
  CompositionCounts,
  Recommendation,
  RecommendRequest,
} from "./types.js";

export interface ConsoleState {
  pool: string[];
  opposition: string[];
  composition: CompositionCounts;
  locked: string[];
  excluded: string[];
  overrides: Record<string, number | boolean>;
  lastResponse: Recommendation | null;
  previousResponse: Recommendation | null;
  sequence: number;
  lastApplied: number;
}

export function initialState(): ConsoleState {
  return {
    pool: [],
    opposition: [],
    composition: {
      batsman: 4,
      bowler: 4,
      wicketkeeper: 1,
      batting_allrounder: 1,
      bowling_allrounder: 1,
    },
    locked: [],
    excluded: [],
    overrides: {},
    lastResponse: null,
    previousResponse: null,
    sequence: 0,
    lastApplied: 0,
  };
}

export function compositionTotal(c: CompositionCounts): number {
  return (
    c.batsman +
    c.bowler +
    c.wicketkeeper +
    c.batting_allrounder +
    c.bowling_allrounder
  );
}

/**
 * The team constraints, verbatim: 11 players, at least one
 * wicketkeeper, at least five bowlers-plus-all-rounders. Returns the
 * violated rule names (empty = submittable).
 */
export function compositionViolations(c: CompositionCounts): string[] {
  const violations: string[] = [];
  const counts = [
    c.batsman,
    c.bowler,
    c.wicketkeeper,
    c.batting_allrounder,
    c.bowling_allrounder,
  ];
  if (counts.some((n) => n < 0 || !Number.isInteger(n))) {
    violations.push("non-negative-counts");
  }
  if (compositionTotal(c) !== 11) {
    violations.push("total-eleven");
  }
  if (c.wicketkeeper < 1) {
    violations.push("wicketkeeper-minimum");
  }
  if (c.bowler + c.batting_allrounder + c.bowling_allrounder < 5) {
    violations.push("bowling-minimum");
  }
  return violations;
}

export function validationErrors(state: ConsoleState): string[] {
  const problems = compositionViolations(state.composition);
  if (state.pool.length === 0) problems.push("empty-pool");
  if (state.opposition.length === 0) problems.push("empty-opposition");
  const conflict = state.locked.filter((p) => state.excluded.includes(p));
  if (conflict.length > 0) problems.push("lock-exclude-conflict");
  if (state.locked.some((p) => !state.pool.includes(p))) {
    problems.push("lock-not-in-pool");
  }
  return problems;
}

export function canSubmit(state: ConsoleState): boolean {
  return validationErrors(state).length === 0;
}

export function buildRequest(state: ConsoleState): RecommendRequest {
  return {
    pool: [...state.pool],
    opposition: [...state.opposition],
    composition: { ...state.composition },
    locked: [...state.locked],
    excluded: [...state.excluded],
    overrides: { ...state.overrides },
    squad_size: 11,
  };
}

export type WhatIf =
  | { action: "lock"; player: string }
  | { action: "exclude"; player: string }
  | { action: "swap"; lock: string; exclude: string };

/**
 * Apply a coach what-if. Locks require pool membership, excludes a
 * place in the last XI, and a player can never be locked and excluded
 * at once; violations throw before any state changes.
 */
export function applyWhatIf(state: ConsoleState, move: WhatIf): ConsoleState {
  const next: ConsoleState = {
    ...state,
    locked: [...state.locked],
    excluded: [...state.excluded],
  };
  const lastXi = state.lastResponse?.xi.map((row) => row.player) ?? [];
  const lock = (player: string) => {
    if (!state.pool.includes(player)) {
      throw new Error(`cannot lock ${player}: not in the candidate pool`);
    }
    if (next.excluded.includes(player)) {
      throw new Error(`cannot lock ${player}: already excluded`);
    }
    if (!next.locked.includes(player)) next.locked.push(player);
  };
  const exclude = (player: string) => {
    if (!lastXi.includes(player)) {
      throw new Error(`cannot exclude ${player}: not in the last XI`);
    }
    if (next.locked.includes(player)) {
      throw new Error(`cannot exclude ${player}: already locked`);
    }
    if (!next.excluded.includes(player)) next.excluded.push(player);
  };
  if (move.action === "lock") lock(move.player);
  else if (move.action === "exclude") exclude(move.player);
  else {
    exclude(move.exclude);
    lock(move.lock);
  }
  return next;
}

/** Stamp an outgoing submission; the returned sequence tags the reply. */
export function nextSequence(state: ConsoleState): [ConsoleState, number] {
  const sequence = state.sequence + 1;
  return [{ ...state, sequence }, sequence];
}

/**
 * Accept a reply only if no newer submission is in flight; stale
 * replies (superseded sequence) leave the state untouched.
 */
export function acceptResponse(
  state: ConsoleState,
  sequence: number,
  response: Recommendation,
): ConsoleState {
  if (sequence < state.sequence || sequence <= state.lastApplied) {
    return state;
  }
  return {
    ...state,
    previousResponse: state.lastResponse,
    lastResponse: response,
    lastApplied: sequence,
  };
}

export interface XiDiff {
  entering: string[];
  leaving: string[];
}

/** Players entering/leaving the XI versus the previous response. */
export function diffXi(
  previous: Recommendation | null,
  current: Recommendation,
): XiDiff {
  const before = new Set(previous?.xi.map((row) => row.player) ?? []);
  const after = new Set(current.xi.map((row) => row.player));
  return {
    entering: [...after].filter((p) => !before.has(p)).sort(),
    leaving: [...before].filter((p) => !after.has(p)).sort(),
  };
}

/**
 * DOM shell: roster pickers, composition widget, submission loop.
 * One recommendation request in flight at a time; superseded replies
 * are dropped by sequence number inside acceptResponse.
 */

import { ApiError, fetchPlayers, postRecommend } from "./api.js";
import { layoutBipartite, renderGraphSvg } from "./graph.js";
import {
  renderConfigEcho,
  renderDeltaTables,
  renderDiff,
  renderError,
  renderValidation,
  renderXi,
} from "./render.js";
import {
  acceptResponse,
  applyWhatIf,
  buildRequest,
  canSubmit,
  diffXi,
  initialState,
  nextSequence,
  validationErrors,
  type ConsoleState,
} from "./state.js";
import type { CompositionCounts, PlayerInfo } from "./types.js";

let state: ConsoleState = initialState();
let players: PlayerInfo[] = [];

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
};

function readSelection(id: string): string[] {
  const select = el(id) as HTMLSelectElement;
  return [...select.selectedOptions].map((option) => option.value);
}

function readComposition(): CompositionCounts {
  const value = (name: string) =>
    Number((el(`comp-${name}`) as HTMLInputElement).value);
  return {
    batsman: value("batsman"),
    bowler: value("bowler"),
    wicketkeeper: value("wicketkeeper"),
    batting_allrounder: value("bar"),
    bowling_allrounder: value("boar"),
  };
}

function syncFromInputs(): void {
  state = {
    ...state,
    pool: readSelection("pool"),
    opposition: readSelection("opposition"),
    composition: readComposition(),
  };
  const problems = validationErrors(state);
  el("validation").innerHTML = renderValidation(problems);
  (el("submit") as HTMLButtonElement).disabled = problems.length > 0;
}

function renderResponse(): void {
  const response = state.lastResponse;
  if (!response) return;
  el("xi").innerHTML = renderXi(response);
  el("diff").innerHTML = state.previousResponse
    ? renderDiff(diffXi(state.previousResponse, response))
    : "";
  el("orderings").innerHTML =
    renderDeltaTables(response) + renderConfigEcho(response.config);
  const graph = layoutBipartite(state.pool, state.opposition, response.edges);
  el("graph").innerHTML = renderGraphSvg(graph);
  el("steering").textContent =
    `locked: ${state.locked.join(", ") || "none"} · ` +
    `excluded: ${state.excluded.join(", ") || "none"}`;
  for (const button of el("xi").querySelectorAll<HTMLButtonElement>(
    ".exclude-btn",
  )) {
    button.addEventListener("click", () => {
      whatIf(() => applyWhatIf(state, {
        action: "exclude",
        player: button.dataset.player ?? "",
      }));
    });
  }
}

async function submit(): Promise<void> {
  syncFromInputs();
  if (!canSubmit(state)) return;
  const [stamped, sequence] = nextSequence(state);
  state = stamped;
  el("status").textContent = "recommending…";
  try {
    const response = await postRecommend(buildRequest(state));
    state = acceptResponse(state, sequence, response);
    el("status").textContent = "";
    el("error").innerHTML = "";
    renderResponse();
  } catch (error) {
    el("status").textContent = "";
    if (error instanceof ApiError) {
      el("error").innerHTML = renderError(error.status, error.body);
    } else {
      el("error").textContent = String(error);
    }
  }
}

function whatIf(transition: () => ConsoleState): void {
  try {
    state = transition();
    void submit();
  } catch (error) {
    el("error").textContent = String(error);
  }
}

function fillSelect(id: string, items: PlayerInfo[]): void {
  const select = el(id) as HTMLSelectElement;
  select.innerHTML = items
    .map(
      (p) =>
        `<option value="${p.id}">${p.id} — ${p.role ?? "?"} (${p.country})</option>`,
    )
    .join("");
}

async function boot(): Promise<void> {
  players = await fetchPlayers();
  fillSelect("pool", players);
  fillSelect("opposition", players);
  el("submit").addEventListener("click", () => void submit());
  el("lock-btn").addEventListener("click", () => {
    const player = (el("lock-input") as HTMLInputElement).value.trim();
    if (player) whatIf(() => applyWhatIf(state, { action: "lock", player }));
  });
  for (const id of ["pool", "opposition"]) {
    el(id).addEventListener("change", syncFromInputs);
  }
  for (const input of document.querySelectorAll("input[id^=comp-]")) {
    input.addEventListener("input", syncFromInputs);
  }
  syncFromInputs();
}

void boot();

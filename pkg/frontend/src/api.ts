/** Thin HTTP client for the recommendation service. */

import type {
  PlayerInfo,
  Recommendation,
  RecommendRequest,
  ServiceError,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ServiceError,
  ) {
    super(body.message);
  }
}

async function parseError(response: Response): Promise<never> {
  let body: ServiceError;
  try {
    body = (await response.json()) as ServiceError;
  } catch {
    body = { error: "http", message: `HTTP ${response.status}` };
  }
  throw new ApiError(response.status, body);
}

export async function fetchPlayers(base = ""): Promise<PlayerInfo[]> {
  const response = await fetch(`${base}/players`);
  if (!response.ok) await parseError(response);
  return (await response.json()) as PlayerInfo[];
}

export async function postRecommend(
  request: RecommendRequest,
  base = "",
): Promise<Recommendation> {
  const response = await fetch(`${base}/recommend`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(request),
  });
  if (!response.ok) await parseError(response);
  return (await response.json()) as Recommendation;
}

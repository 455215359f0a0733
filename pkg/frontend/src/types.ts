/** Wire types mirroring the service's request and response bodies. */

export type Role =
  | "batsman"
  | "bowler"
  | "wicketkeeper"
  | "batting all-rounder"
  | "bowling all-rounder";

export const ROLES: Role[] = [
  "wicketkeeper",
  "batsman",
  "bowler",
  "batting all-rounder",
  "bowling all-rounder",
];

export interface CompositionCounts {
  batsman: number;
  bowler: number;
  wicketkeeper: number;
  batting_allrounder: number;
  bowling_allrounder: number;
}

export interface RecommendRequest {
  pool: string[];
  opposition: string[];
  composition: CompositionCounts;
  locked: string[];
  excluded: string[];
  overrides: Record<string, number | boolean>;
  squad_size: number;
}

export interface XiEntry {
  player: string;
  role: Role;
}

export interface GraphEdge {
  candidate: string;
  opponent: string;
  weight: number;
  basis: "direct" | "proxied";
  via: string | null;
}

export interface RankedRow {
  player: string;
  delta: number | null;
  edge_count: number;
  mean_weight: number | null;
  career_phi: number | null;
  segment: number;
}

export interface Recommendation {
  xi: XiEntry[];
  composition: CompositionCounts;
  locked: string[];
  excluded: string[];
  edges: GraphEdge[];
  orderings: Record<string, RankedRow[]>;
  config: Record<string, unknown>;
}

export interface ServiceError {
  error: string;
  message: string;
  rule?: string;
  slot?: string;
}

export interface PlayerInfo {
  id: string;
  name: string;
  country: string;
  role: Role | null;
}

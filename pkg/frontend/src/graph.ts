/**
 * Two-column bipartite layout of the matchup graph: candidates on the
 * left, opposition on the right, proxied edges dashed. The rendered
 * edge set is exactly the response's edge list.
 */

import type { GraphEdge } from "./types.js";
import { escapeHtml } from "./render.js";

export interface GraphLayout {
  width: number;
  height: number;
  nodes: { id: string; side: "left" | "right"; x: number; y: number }[];
  edges: {
    from: string;
    to: string;
    x1: number;
    y1: number;
    x2: number;
    y2: number;
    dashed: boolean;
    label: string;
  }[];
}

const COLUMN_GAP = 420;
const ROW_GAP = 26;
const MARGIN = 40;

export function layoutBipartite(
  candidates: string[],
  opposition: string[],
  edges: GraphEdge[],
): GraphLayout {
  const left = [...candidates].sort();
  const right = [...opposition].sort();
  const nodes: GraphLayout["nodes"] = [];
  const position = new Map<string, { x: number; y: number }>();
  left.forEach((id, i) => {
    const point = { x: MARGIN, y: MARGIN + i * ROW_GAP };
    nodes.push({ id, side: "left", ...point });
    position.set(`L:${id}`, point);
  });
  right.forEach((id, i) => {
    const point = { x: MARGIN + COLUMN_GAP, y: MARGIN + i * ROW_GAP };
    nodes.push({ id, side: "right", ...point });
    position.set(`R:${id}`, point);
  });
  const laidOut = edges.map((edge) => {
    const a = position.get(`L:${edge.candidate}`);
    const b = position.get(`R:${edge.opponent}`);
    if (!a || !b) {
      throw new Error(
        `edge ${edge.candidate} -> ${edge.opponent} references an unknown node`,
      );
    }
    return {
      from: edge.candidate,
      to: edge.opponent,
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      dashed: edge.basis === "proxied",
      label: edge.weight.toFixed(3),
    };
  });
  const rows = Math.max(left.length, right.length, 1);
  return {
    width: COLUMN_GAP + 2 * MARGIN + 120,
    height: MARGIN * 2 + rows * ROW_GAP,
    nodes,
    edges: laidOut,
  };
}

export function renderGraphSvg(layout: GraphLayout): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" class="matchup-graph">`,
  );
  for (const edge of layout.edges) {
    const dash = edge.dashed ? ` stroke-dasharray="6 4"` : "";
    parts.push(
      `<line x1="${edge.x1}" y1="${edge.y1}" x2="${edge.x2}" y2="${edge.y2}"` +
        ` stroke="currentColor" stroke-width="1"${dash}>` +
        `<title>${escapeHtml(edge.from)} vs ${escapeHtml(edge.to)}: ${edge.label}</title></line>`,
    );
  }
  for (const node of layout.nodes) {
    const anchor = node.side === "left" ? "end" : "start";
    const dx = node.side === "left" ? -6 : 6;
    parts.push(
      `<circle cx="${node.x}" cy="${node.y}" r="3" fill="currentColor"/>` +
        `<text x="${node.x + dx}" y="${node.y + 4}" text-anchor="${anchor}" ` +
        `font-size="11">${escapeHtml(node.id)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

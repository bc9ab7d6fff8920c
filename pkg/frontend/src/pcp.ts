import { StatsPayload } from "./types.js";

/**
 * Parallel-coordinates geometry: one vertical axis per visible element, one
 * polyline per group. Every axis is normalized to the (min, max) of the
 * group means; a constant axis puts every line at mid-height, matching the
 * engine's normalization rule.
 */

export interface PcpAxis {
  element: string;
  min: number;
  max: number;
}

export interface PcpPolyline {
  groupId: number;
  color: string;
  /** One normalized [0, 1] value per axis. */
  values: number[];
}

export interface PcpModel {
  axes: PcpAxis[];
  lines: PcpPolyline[];
}

export interface PcpSource {
  groupId: number;
  color: string;
  stats: StatsPayload;
}

export function buildPcp(sources: PcpSource[], hidden: Set<string> = new Set()): PcpModel {
  if (sources.length === 0) return { axes: [], lines: [] };
  const elements = sources[0].stats.stats
    .map((s) => s.element)
    .filter((name) => !hidden.has(name));
  const means = sources.map(
    (source) => new Map(source.stats.stats.map((s) => [s.element, s.mean])),
  );
  const axes: PcpAxis[] = elements.map((element) => {
    const values = means.map((m) => m.get(element) ?? 0);
    return { element, min: Math.min(...values), max: Math.max(...values) };
  });
  const lines: PcpPolyline[] = sources.map((source, i) => ({
    groupId: source.groupId,
    color: source.color,
    values: axes.map((axis) => {
      const v = means[i].get(axis.element) ?? 0;
      return axis.max > axis.min ? (v - axis.min) / (axis.max - axis.min) : 0.5;
    }),
  }));
  return { axes, lines };
}

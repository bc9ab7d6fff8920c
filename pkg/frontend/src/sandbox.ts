import { ElementStats, StatsPayload } from "./types.js";
import { SandboxSettings } from "./viewstate.js";

/** Mirrors the engine's log display rule: zeros sit at the floor. */
export const LOG_FLOOR = 1e-4;

export const MAX_GROUP_PANELS = 20;
/** All-points summary plus one panel per group. */
export const MAX_PANELS = MAX_GROUP_PANELS + 1;

export function displayValue(v: number, scale: "linear" | "log10", floor = LOG_FLOOR): number {
  return scale === "linear" ? v : Math.log10(Math.max(v, floor));
}

export interface BarModel {
  element: string;
  /** Bar encodes the group mean for this element. */
  mean: number;
  /** Inner bar spans mean +- 1 sd, clamped at zero. */
  innerLow: number;
  innerHigh: number;
  /** Display-space coordinates under the current scale. */
  value: number;
  innerLowValue: number;
  innerHighValue: number;
  tooltip: TooltipModel;
}

export interface TooltipModel {
  element: string;
  mean: number;
  sd: number;
  cv: number | null;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export interface PanelModel {
  /** null for the all-points summary panel. */
  groupId: number | null;
  title: string;
  color: string | null;
  bars: BarModel[];
}

export interface SandboxModel {
  panels: PanelModel[];
  /** Ordered bar columns shared by every panel. */
  elements: string[];
  /** Per-element display-space axis max across panels (ticks clamp to it). */
  axisMax: Map<string, number>;
}

function toBar(stats: ElementStats, scale: "linear" | "log10"): BarModel {
  const innerLow = Math.max(stats.mean - stats.sd, 0);
  const innerHigh = stats.mean + stats.sd;
  return {
    element: stats.element,
    mean: stats.mean,
    innerLow,
    innerHigh,
    value: displayValue(stats.mean, scale),
    innerLowValue: displayValue(innerLow, scale),
    innerHighValue: displayValue(innerHigh, scale),
    tooltip: {
      element: stats.element,
      mean: stats.mean,
      sd: stats.sd,
      cv: stats.cv,
      min: stats.min,
      q1: stats.q1,
      median: stats.median,
      q3: stats.q3,
      max: stats.max,
    },
  };
}

export interface PanelSource {
  groupId: number | null;
  title: string;
  color: string | null;
  stats: StatsPayload;
}

/**
 * Assemble the comparison panels: the all-points summary first, then one
 * panel per group, hidden elements dropped everywhere. Column order follows
 * the all-points payload (the service already sorted it).
 */
export function buildSandbox(sources: PanelSource[], settings: SandboxSettings): SandboxModel {
  if (sources.length === 0) {
    return { panels: [], elements: [], axisMax: new Map() };
  }
  if (sources.length > MAX_PANELS) {
    throw new Error(`sandbox cannot show more than ${MAX_PANELS} panels`);
  }
  const elements = sources[0].stats.stats
    .map((s) => s.element)
    .filter((name) => !settings.hidden.has(name));
  const panels: PanelModel[] = sources.map((source) => {
    const byElement = new Map(source.stats.stats.map((s) => [s.element, s]));
    const bars = elements
      .filter((name) => byElement.has(name))
      .map((name) => toBar(byElement.get(name)!, settings.scale));
    return { groupId: source.groupId, title: source.title, color: source.color, bars };
  });
  const axisMax = new Map<string, number>();
  for (const panel of panels) {
    for (const bar of panel.bars) {
      const top = Math.max(bar.value, bar.innerHighValue);
      axisMax.set(bar.element, Math.max(axisMax.get(bar.element) ?? -Infinity, top));
    }
  }
  return { panels, elements, axisMax };
}

export interface TickMark {
  element: string;
  /** Display-space coordinate of the hovered point's value. */
  value: number;
  /** True when the value exceeded the axis and was clamped to its end. */
  clamped: boolean;
}

/**
 * Ticks drawn across every panel for the hovered point: one per visible
 * element at the point's value under the current scale.
 */
export function pointTicks(
  pointStats: StatsPayload,
  model: SandboxModel,
  settings: SandboxSettings,
): TickMark[] {
  const byElement = new Map(pointStats.stats.map((s) => [s.element, s]));
  const ticks: TickMark[] = [];
  for (const element of model.elements) {
    const stats = byElement.get(element);
    if (!stats) continue;
    const value = displayValue(stats.mean, settings.scale);
    const axisTop = model.axisMax.get(element) ?? value;
    ticks.push({
      element,
      value: Math.min(value, axisTop),
      clamped: value > axisTop,
    });
  }
  return ticks;
}

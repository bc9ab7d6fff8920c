import { RegistrySnapshot } from "./types.js";

/** Points in no group render in neutral gray. */
export const UNGROUPED_COLOR = "#9aa0a6";

/**
 * Resolve the display color of every point from the registry. The registry
 * partitions points, so the lookup is unambiguous.
 */
export function pointColors(nPoints: number, registry: RegistrySnapshot): string[] {
  const colors = new Array<string>(nPoints).fill(UNGROUPED_COLOR);
  for (const group of registry.groups) {
    for (const id of group.members) {
      colors[id] = group.color;
    }
  }
  return colors;
}

/** point id -> owning group id, for hit-testing and annotation overlays. */
export function membershipIndex(registry: RegistrySnapshot): Map<number, number> {
  const owner = new Map<number, number>();
  for (const group of registry.groups) {
    for (const id of group.members) {
      owner.set(id, group.group_id);
    }
  }
  return owner;
}

/** Interaction state shared across the workbench views. */

export enum ToolMode {
  Navigate = "navigate",
  Examine = "examine",
  Lasso = "lasso",
}

export type ScaleKind = "linear" | "log10";
export type SortKind = "mean_desc" | "mean_asc" | "cv_desc" | "cv_asc";

export interface SandboxSettings {
  scale: ScaleKind;
  sort: SortKind;
  /** Element symbols hidden from every panel. */
  hidden: Set<string>;
}

export interface Notice {
  kind: "info" | "error";
  text: string;
}

export class ViewState {
  private mode: ToolMode = ToolMode.Navigate;
  activeGroup: number | null = null;
  hoverPoint: number | null = null;
  notice: Notice | null = null;
  readonly sandbox: SandboxSettings = {
    scale: "linear",
    sort: "mean_desc",
    hidden: new Set(),
  };

  get toolMode(): ToolMode {
    return this.mode;
  }

  /** Exactly one tool mode is active at a time. */
  setToolMode(mode: ToolMode): void {
    this.mode = mode;
    if (mode !== ToolMode.Examine) this.hoverPoint = null;
  }

  setNotice(notice: Notice | null): void {
    this.notice = notice;
  }

  toggleElementHidden(element: string): void {
    if (this.sandbox.hidden.has(element)) {
      this.sandbox.hidden.delete(element);
    } else {
      this.sandbox.hidden.add(element);
    }
  }
}

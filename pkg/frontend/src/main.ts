import { ApiClient } from "./api.js";
import { Workbench } from "./app.js";
import { ContextImage } from "./contextImage.js";
import { DEFAULT_FORM, errorsFromApi, toRequest, validateForm } from "./clusterPanel.js";
import { LassoTrace } from "./lasso.js";
import { ApiError } from "./types.js";
import { ToolMode } from "./viewstate.js";

const BASE_URL = new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8077";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient(BASE_URL);
  const listing = await api.listDatasets();
  if (listing.datasets.length === 0) {
    el("notice").textContent = "backend has no datasets loaded";
    return;
  }
  const bench = new Workbench(api, listing.datasets[0].id);
  const canvas = el<HTMLCanvasElement>("map");
  const image = new ContextImage(canvas);
  let trace: LassoTrace | null = null;

  const render = () => {
    if (!bench.dataset) return;
    image.render(bench.dataset, bench.colors, bench.camera, {
      hoverPoint: bench.view.hoverPoint,
      lassoPath: trace?.path,
      annotation: bench.hoverAnnotation,
    });
    renderPanels(bench);
    renderPcp(bench);
    const notice = bench.view.notice;
    const bar = el("notice");
    bar.textContent = notice ? notice.text : "";
    bar.className = notice ? `notice ${notice.kind}` : "notice";
  };
  bench.onChange(render);
  await bench.load({ width: canvas.width, height: canvas.height });

  for (const mode of [ToolMode.Navigate, ToolMode.Examine, ToolMode.Lasso]) {
    el(`tool-${mode}`).addEventListener("click", () => {
      bench.view.setToolMode(mode);
      for (const other of [ToolMode.Navigate, ToolMode.Examine, ToolMode.Lasso]) {
        el(`tool-${other}`).classList.toggle("active", other === mode);
      }
      render();
    });
  }

  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("pointerdown", (event) => {
    const mode = bench.view.toolMode;
    if (mode === ToolMode.Lasso) {
      trace = new LassoTrace();
      trace.add(event.offsetX, event.offsetY);
    } else if (mode === ToolMode.Navigate) {
      dragging = true;
      lastX = event.offsetX;
      lastY = event.offsetY;
    }
    canvas.setPointerCapture(event.pointerId);
  });
  canvas.addEventListener("pointermove", (event) => {
    const mode = bench.view.toolMode;
    if (mode === ToolMode.Lasso && trace) {
      trace.add(event.offsetX, event.offsetY);
      render();
    } else if (mode === ToolMode.Navigate && dragging) {
      bench.camera.panBy(event.offsetX - lastX, event.offsetY - lastY);
      lastX = event.offsetX;
      lastY = event.offsetY;
      render();
    } else if (mode === ToolMode.Examine && bench.dataset) {
      const hit = image.hitTest(bench.dataset, bench.camera, event.offsetX, event.offsetY);
      if (hit !== bench.view.hoverPoint) void bench.hoverPoint(hit);
    }
  });
  canvas.addEventListener("pointerup", (event) => {
    dragging = false;
    if (bench.view.toolMode === ToolMode.Lasso && trace) {
      const finished = trace;
      trace = null;
      void bench.applyLasso(finished, event.shiftKey);
    }
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    bench.camera.zoomAt(event.deltaY < 0 ? 1.15 : 1 / 1.15, event.offsetX, event.offsetY);
    render();
  });

  el("add-group").addEventListener("click", () => {
    const name = window.prompt("group name", `group ${bench.registry.groups.length + 1}`);
    if (name) void bench.createGroup(name);
  });
  el<HTMLSelectElement>("sort").addEventListener("change", (event) => {
    bench.view.sandbox.sort = (event.target as HTMLSelectElement).value as never;
    void bench.refreshSandbox().then(render);
  });
  el<HTMLSelectElement>("scale").addEventListener("change", (event) => {
    bench.view.sandbox.scale = (event.target as HTMLSelectElement).value as never;
    void bench.refreshSandbox().then(render);
  });

  wireClusterForm(bench, render);
  render();
}

function renderPanels(bench: Workbench): void {
  const host = el("sandbox");
  host.innerHTML = "";
  for (const panel of bench.sandbox.panels) {
    const card = document.createElement("div");
    card.className = "panel";
    const title = document.createElement("h3");
    title.textContent = panel.title;
    if (panel.color) title.style.borderLeft = `10px solid ${panel.color}`;
    card.appendChild(title);
    const row = document.createElement("div");
    row.className = "bars";
    const values = panel.bars.map((b) => b.value);
    const top = Math.max(...values, 1e-9);
    const bottom = Math.min(0, ...values);
    for (const bar of panel.bars) {
      const column = document.createElement("div");
      column.className = "bar-column";
      column.title =
        `${bar.element}: mean ${bar.tooltip.mean.toPrecision(4)}, ` +
        `sd ${bar.tooltip.sd.toPrecision(4)}, min ${bar.tooltip.min.toPrecision(4)}, ` +
        `Q1 ${bar.tooltip.q1.toPrecision(4)}, median ${bar.tooltip.median.toPrecision(4)}, ` +
        `Q3 ${bar.tooltip.q3.toPrecision(4)}, max ${bar.tooltip.max.toPrecision(4)}`;
      const fill = document.createElement("div");
      fill.className = "bar-fill";
      const scale = (v: number) => (100 * (v - bottom)) / (top - bottom || 1);
      fill.style.height = `${Math.max(scale(bar.value), 1)}%`;
      const inner = document.createElement("div");
      inner.className = "bar-inner";
      inner.style.bottom = `${scale(bar.innerLowValue)}%`;
      inner.style.height = `${Math.max(scale(bar.innerHighValue) - scale(bar.innerLowValue), 0.5)}%`;
      const tick = bench.hoverTicks.find((t) => t.element === bar.element);
      column.appendChild(fill);
      column.appendChild(inner);
      if (tick) {
        const mark = document.createElement("div");
        mark.className = tick.clamped ? "tick clamped" : "tick";
        mark.style.bottom = `${scale(tick.value)}%`;
        column.appendChild(mark);
      }
      const label = document.createElement("span");
      label.textContent = bar.element;
      column.appendChild(label);
      row.appendChild(column);
    }
    card.appendChild(row);
    host.appendChild(card);
  }
}

function renderPcp(bench: Workbench): void {
  const svg = el("pcp");
  const { axes, lines } = bench.pcp;
  const width = 680;
  const height = 180;
  const pad = 24;
  const x = (i: number) =>
    axes.length > 1 ? pad + (i * (width - 2 * pad)) / (axes.length - 1) : width / 2;
  const y = (v: number) => height - pad - v * (height - 2 * pad);
  const parts: string[] = [];
  for (let i = 0; i < axes.length; i++) {
    parts.push(`<line x1="${x(i)}" y1="${pad}" x2="${x(i)}" y2="${height - pad}" class="axis"/>`);
    parts.push(`<text x="${x(i)}" y="${height - 6}" text-anchor="middle">${axes[i].element}</text>`);
  }
  for (const line of lines) {
    const points = line.values.map((v, i) => `${x(i)},${y(v)}`).join(" ");
    parts.push(`<polyline points="${points}" fill="none" stroke="${line.color}" stroke-width="1.5"/>`);
  }
  svg.innerHTML = parts.join("");
}

function wireClusterForm(bench: Workbench, render: () => void): void {
  const values = { ...DEFAULT_FORM };
  const read = () => {
    values.algorithm = el<HTMLSelectElement>("algo").value as never;
    values.nClusters = Number(el<HTMLInputElement>("k").value);
    values.linkage = el<HTMLSelectElement>("linkage").value as never;
    values.reduction = el<HTMLSelectElement>("reduction").value as never;
    values.varianceFraction = Number(el<HTMLInputElement>("variance").value);
    values.perplexity = Number(el<HTMLInputElement>("perplexity").value);
    values.seed = Number(el<HTMLInputElement>("seed").value);
  };
  el("run-cluster").addEventListener("click", async () => {
    read();
    const nPoints = bench.dataset?.points.length ?? 0;
    const errors = validateForm(values, nPoints);
    showFieldErrors(errors);
    if (Object.keys(errors).length > 0) return;
    const response = await bench.runClustering(toRequest(values, true));
    if (!response && bench.view.notice) {
      const apiError = new ApiError(400, {
        error_code: "invalid_config",
        message: bench.view.notice.text,
      });
      showFieldErrors(errorsFromApi(apiError));
    }
    render();
  });
}

function showFieldErrors(errors: Record<string, string | undefined>): void {
  for (const field of ["n_clusters", "variance_fraction", "perplexity", "form"]) {
    const slot = document.getElementById(`err-${field}`);
    if (slot) slot.textContent = errors[field] ?? "";
  }
}

void boot();

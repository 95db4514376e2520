// Page wiring: three activity panels against a posteriorlab server on the
// same origin. All state lives in the pure modules; this file only moves
// values between the DOM and the API client.

import { ApiCallError, Client, LatestOnly } from "./api.js";
import {
  applyError, applyFit, densityPolyline, formatFit, newSession,
  validateInputs,
} from "./elicitation.js";
import {
  edPreset, formatCoverage, proportionPreset, tableToBars, validateDraft,
} from "./discrete.js";
import {
  applyStep, applyRun, describeStep, newWalk, normalizedWeights,
  visitFrequencies,
} from "./walk.js";

const client = new Client("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderBars(target: HTMLElement, labels: (string | number)[],
                    heights: number[], marked?: boolean[]): void {
  const top = Math.max(...heights, 1e-12);
  target.innerHTML = heights
    .map((h, i) => {
      const cls = marked?.[i] ? "bar marked" : "bar";
      const px = Math.round((h / top) * 120);
      return `<div class="${cls}" title="${labels[i]}: ${h.toFixed(3)}"` +
        ` style="height:${px}px"></div>`;
    })
    .join("");
}

// --- discrete prior builder -------------------------------------------------

const discreteGate = new LatestOnly();

async function runDiscrete(values: number[], weights: number[],
                           likelihood: ReturnType<typeof edPreset>["likelihood"],
                           level: number): Promise<void> {
  const status = el<HTMLElement>("discrete-status");
  const check = validateDraft({ values, weights });
  if (!check.ok) {
    status.textContent = check.message ?? "invalid prior";
    return;
  }
  try {
    const out = await discreteGate.run(async () => {
      const update = await client.discreteUpdate(values, weights, likelihood);
      const credible = await client.discreteCredible(update.table, level);
      return { update, credible };
    });
    if (!out) return; // superseded by a newer submission
    const bars = tableToBars(out.update.table, out.credible);
    renderBars(el("prior-bars"), bars.map(b => b.value),
               bars.map(b => b.prior));
    renderBars(el("posterior-bars"), bars.map(b => b.value),
               bars.map(b => b.posterior), bars.map(b => b.inCredibleSet));
    status.textContent = formatCoverage(out.credible);
  } catch (e) {
    status.textContent = e instanceof ApiCallError ? e.message : String(e);
  }
}

// --- elicitation ------------------------------------------------------------

let session = newSession();
const elicitGate = new LatestOnly();

function renderHistory(): void {
  el("elicit-history").innerHTML = session.history
    .map(h => {
      const right = h.fit
        ? formatFit(h.fit).shapes
        : `error: ${h.error?.message ?? "?"}`;
      return `<li>median ${h.median}, p90 ${h.p90} &rarr; ${right}</li>`;
    })
    .join("");
}

async function submitElicitation(median: number, p90: number): Promise<void> {
  const status = el<HTMLElement>("elicit-status");
  const check = validateInputs(median, p90);
  if (!check.ok) {
    status.textContent = check.message ?? "invalid inputs";
    return;
  }
  const out = await elicitGate.run(() =>
    client.betaFromQuantiles(0.5, median, 0.9, p90)
      .then(fit => ({ fit, error: null as ApiCallError | null }))
      .catch((e: unknown) => ({
        fit: null,
        error: e instanceof ApiCallError
          ? e
          : new ApiCallError("network", String(e)),
      })));
  if (!out) return;
  if (out.fit) {
    session = applyFit(session, median, p90, out.fit);
    const view = formatFit(out.fit);
    status.textContent =
      `${view.shapes}; 50% ${view.central50}; 90% ${view.central90}`;
    el<HTMLElement>("beta-curve").setAttribute(
      "points", densityPolyline(out.fit, 400, 140));
  } else if (out.error) {
    session = applyError(session, median, p90,
                         { code: out.error.code, message: out.error.message });
    status.textContent = out.error.message;
  }
  renderHistory();
}

// --- walk explorer ----------------------------------------------------------

let walk = newWalk([4, 2, 1, 3, 2], 1, null);

function renderWalk(): void {
  renderBars(el("walk-bars"), walk.weights.map((_, i) => i + 1),
             visitFrequencies(walk));
  renderBars(el("walk-target"), walk.weights.map((_, i) => i + 1),
             normalizedWeights(walk));
  el("walk-position").textContent = String(walk.position);
  el("walk-count").textContent = String(walk.path.length - 1);
  el("walk-last").textContent = walk.lastStep
    ? (() => {
        const c = describeStep(walk.lastStep);
        return `proposed ${c.candidate}, R = ${c.ratio}, ${c.decision}`;
      })()
    : "";
}

async function stepWalk(): Promise<void> {
  try {
    const step = await client.walkStep([...walk.weights], walk.position,
                                       walk.seed ?? undefined);
    walk = applyStep(walk, step);
    renderWalk();
  } catch {
    el("walk-last").textContent = "request failed; state unchanged, try again";
  }
}

async function runWalkBatch(steps: number): Promise<void> {
  try {
    const run = await client.walkRun([...walk.weights], walk.position, steps,
                                     walk.seed ?? undefined);
    walk = applyRun(walk, run);
    renderWalk();
  } catch {
    el("walk-last").textContent = "request failed; state unchanged, try again";
  }
}

// --- bootstrap --------------------------------------------------------------

export function bootstrap(): void {
  el<HTMLButtonElement>("discrete-ed").onclick = () => {
    const p = edPreset();
    void runDiscrete(p.draft.values, p.draft.weights, p.likelihood, 0.95);
  };
  el<HTMLButtonElement>("discrete-proportion").onclick = () => {
    const p = proportionPreset();
    void runDiscrete(p.draft.values, p.draft.weights, p.likelihood, 0.9);
  };
  el<HTMLButtonElement>("elicit-submit").onclick = () => {
    void submitElicitation(
      Number(el<HTMLInputElement>("elicit-median").value),
      Number(el<HTMLInputElement>("elicit-p90").value));
  };
  el<HTMLButtonElement>("walk-step-btn").onclick = () => void stepWalk();
  el<HTMLButtonElement>("walk-run-btn").onclick = () => void runWalkBatch(500);
  el<HTMLButtonElement>("walk-reset").onclick = () => {
    const seedText = el<HTMLInputElement>("walk-seed").value;
    const seed = seedText === "" ? null : Number(seedText);
    walk = newWalk([4, 2, 1, 3, 2], 1, seed);
    renderWalk();
  };
  renderWalk();
}

if (typeof document !== "undefined" && document.getElementById("walk-bars")) {
  bootstrap();
}

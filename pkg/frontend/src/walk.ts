// Random-walk explorer state. The server decides every move; the client only
// accumulates the path and turns visit counts into frequency bars.

import { WalkRunResult, WalkStepResult } from "./api.js";

export interface WalkState {
  weights: readonly number[];
  position: number;
  path: readonly number[];
  seed: number | null;
  lastStep: WalkStepResult | null;
}

export function newWalk(weights: number[], start: number,
                        seed: number | null = null): WalkState {
  if (weights.length === 0 || weights.some(w => w <= 0)) {
    throw new Error("weights must be positive");
  }
  if (!Number.isInteger(start) || start < 1 || start > weights.length) {
    throw new Error(`start must be in 1..${weights.length}`);
  }
  return { weights, position: start, path: [start], seed, lastStep: null };
}

export function applyStep(ws: WalkState, step: WalkStepResult): WalkState {
  return {
    ...ws,
    position: step.next,
    path: [...ws.path, step.next],
    // chain the next request off the seed the server echoed back
    seed: step.seed + 1,
    lastStep: step,
  };
}

export function applyRun(ws: WalkState, run: WalkRunResult): WalkState {
  if (run.path[0] !== ws.position) {
    throw new Error("batch run did not start at the current position");
  }
  const tail = run.path.slice(1);
  return {
    ...ws,
    position: run.path[run.path.length - 1],
    path: [...ws.path, ...tail],
    seed: run.seed + 1,
    lastStep: null,
  };
}

// frequencies = normalized visit counts of the path
export function visitFrequencies(ws: WalkState): number[] {
  const counts = new Array<number>(ws.weights.length).fill(0);
  for (const p of ws.path) counts[p - 1] += 1;
  return counts.map(c => c / ws.path.length);
}

export function normalizedWeights(ws: WalkState): number[] {
  const total = ws.weights.reduce((a, b) => a + b, 0);
  return ws.weights.map(w => w / total);
}

export interface StepCaption {
  candidate: number;
  ratio: string;
  decision: "accepted" | "stayed";
}

export function describeStep(step: WalkStepResult): StepCaption {
  return {
    candidate: step.candidate,
    ratio: step.R.toFixed(3),
    decision: step.accepted ? "accepted" : "stayed",
  };
}
